"""Turns pwquality.conf-style text into ordered assignments plus diagnostics.

Two modes with identical extraction, different severities:

* ``strict`` mirrors what the real enforcement module tolerates, so broken
  syntax is fatal and the file must not be used for enforcement;
* ``lenient`` downgrades everything to warnings so that typical LLM damage
  (bracket headers, a forgotten ``=``) stays measurable instead of aborting
  an analysis.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .schema import (
    FLAG,
    INTEGER,
    FlagValue,
    IntValue,
    ParameterSchema,
    ParamValue,
    StrValue,
    default_schema,
)

STRICT = "strict"
LENIENT = "lenient"
MODES = (STRICT, LENIENT)

FATAL = "fatal"
WARNING = "warning"

MALFORMED_ASSIGNMENT = "malformed_assignment"
UNKNOWN_PARAMETER = "unknown_parameter"
INVALID_VALUE = "invalid_value"
SECTION_HEADER = "section_header"
DUPLICATE_KEY = "duplicate_key"
EMPTY_FILE_NOTE = "empty_file_note"

# Diagnostic kinds the real module chokes on. Their presence, whatever the
# parse mode, marks a file the enforcement layer would refuse to apply.
FALLBACK_KINDS = frozenset({MALFORMED_ASSIGNMENT, INVALID_VALUE, SECTION_HEADER})

_INT_TOKEN = re.compile(r"[+-]?[0-9]+")


@dataclass(frozen=True)
class Diagnostic:
    line_no: int
    severity: str
    kind: str
    message: str


@dataclass(frozen=True)
class Assignment:
    """One ``name = value`` extraction. line_no is provenance, not identity."""

    name: str
    value: ParamValue
    line_no: int = field(compare=False)


@dataclass(frozen=True)
class ParsedConfig:
    assignments: tuple[Assignment, ...]
    diagnostics: tuple[Diagnostic, ...]
    mode: str

    def assignment_map(self) -> dict[str, ParamValue]:
        """Name-to-value view in first-seen order; the last assignment wins."""
        out: dict[str, ParamValue] = {}
        for a in self.assignments:
            out[a.name] = a.value
        return out

    def has_fatal(self) -> bool:
        return any(d.severity == FATAL for d in self.diagnostics)

    def unenforceable(self) -> bool:
        """True when the real module would reject the file and fall back."""
        return any(d.kind in FALLBACK_KINDS for d in self.diagnostics)


def parse_config(
    text: str | bytes,
    mode: str = LENIENT,
    schema: ParameterSchema | None = None,
) -> ParsedConfig:
    """Parse config text into assignments and per-line diagnostics.

    ``#`` starts a comment anywhere on a line; blank lines are skipped. The
    first ``=`` splits key from value, whitespace around both is trimmed, and
    internal whitespace in values survives (badwords is space-separated).
    Unknown parameter names are kept (with a warning) because the metrics
    need them; known flag parameters may appear bare. Bytes must be UTF-8.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    schema = schema or default_schema()
    fatal_kinds = FALLBACK_KINDS if mode == STRICT else frozenset()

    assignments: list[Assignment] = []
    diagnostics: list[Diagnostic] = []
    seen: dict[str, int] = {}
    saw_content = False

    def diag(line_no: int, kind: str, message: str) -> None:
        severity = FATAL if kind in fatal_kinds else WARNING
        diagnostics.append(Diagnostic(line_no, severity, kind, message))

    def note_duplicate(name: str, line_no: int) -> None:
        if name in seen:
            diag(line_no, DUPLICATE_KEY,
                 f"{name} already assigned on line {seen[name]}; the last assignment wins")
        seen[name] = line_no

    for line_no, raw_line in enumerate(text.split("\n"), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        saw_content = True

        if "=" in line:
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if not key or any(ch.isspace() for ch in key):
                diag(line_no, MALFORMED_ASSIGNMENT,
                     f"cannot read a parameter name out of {line!r}")
                continue
            spec = schema.lookup(key)
            if spec is None:
                diag(line_no, UNKNOWN_PARAMETER,
                     f"{key!r} is not a pwquality.conf parameter; enforcement ignores it")
                parsed_value: ParamValue = StrValue(value)
            elif spec.value_kind == INTEGER:
                if _INT_TOKEN.fullmatch(value):
                    parsed_value = IntValue(int(value))
                else:
                    diag(line_no, INVALID_VALUE,
                         f"{key} takes an integer, got {value!r}")
                    parsed_value = StrValue(value)
            elif spec.value_kind == FLAG:
                # Valueless option: presence is all that counts.
                parsed_value = FlagValue(True)
            else:
                parsed_value = StrValue(value)
            note_duplicate(key, line_no)
            assignments.append(Assignment(key, parsed_value, line_no))
        elif line.startswith("[") and line.endswith("]"):
            diag(line_no, SECTION_HEADER,
                 f"section header {line!r} is not pwquality.conf syntax")
        else:
            spec = schema.lookup(line)
            if spec is not None and spec.value_kind == FLAG:
                note_duplicate(line, line_no)
                assignments.append(Assignment(line, FlagValue(True), line_no))
            else:
                diag(line_no, MALFORMED_ASSIGNMENT, f"no '=' in {line!r}")

    if not saw_content:
        diagnostics.append(Diagnostic(
            0, WARNING, EMPTY_FILE_NOTE,
            "no content: every parameter keeps its documented default"))

    return ParsedConfig(tuple(assignments), tuple(diagnostics), mode)


def extract_config_from_response(raw: str) -> str:
    """Reduce a raw LLM response to config text.

    Returns the contents of the first fenced code block when one is present
    (prose outside the fence is discarded, the fence's language tag is
    ignored, an unterminated fence runs to the end); otherwise returns the
    input unchanged.
    """
    lines = raw.split("\n")
    start = None
    for i, line in enumerate(lines):
        if line.lstrip().startswith("```"):
            start = i + 1
            break
    if start is None:
        return raw
    body = []
    for line in lines[start:]:
        if line.lstrip().startswith("```"):
            break
        body.append(line)
    return "".join(line + "\n" for line in body)


def serialize_config(parsed: ParsedConfig) -> str:
    """Emit ``key = value`` lines (LF endings) for a parsed config.

    Flag assignments serialize as the bare name, matching how the real file
    spells them. Reparsing the output of a diagnostic-free strict-mode config
    yields an equal ParsedConfig.
    """
    lines = []
    for a in parsed.assignments:
        if isinstance(a.value, FlagValue):
            if a.value.present:
                lines.append(a.name)
        elif isinstance(a.value, IntValue):
            lines.append(f"{a.name} = {a.value.value}")
        else:
            lines.append(f"{a.name} = {a.value.value}".rstrip())
    return "".join(line + "\n" for line in lines)
