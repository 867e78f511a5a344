"""Policy corpus loading: prompt text plus a hand-authored gold benchmark.

Layout, one directory per entry:

    <entry-id>/prompt.txt      natural-language policy given to the model
    <entry-id>/benchmark.conf  gold pwquality.conf for that policy
    <entry-id>/notes.txt       optional; lists clauses pwquality.conf cannot
                               express (red herrings), which are deliberately
                               absent from the benchmark
    <entry-id>/doc.txt         optional; overrides the documentation text
                               embedded by the doc-augmented prompt arm

Benchmarks must be gold: strict parse, no fatal diagnostics, no unknown
parameter names.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .harness import PolicyPrompt
from .parser import STRICT, UNKNOWN_PARAMETER, ParsedConfig, parse_config
from .schema import ParameterSchema


class CorpusError(ValueError):
    """A corpus entry violates the layout or a benchmark is not gold."""


@dataclass(frozen=True)
class CorpusEntry:
    prompt: PolicyPrompt
    benchmark: ParsedConfig
    notes: str = ""


def _validate_benchmark(entry_id: str, benchmark: ParsedConfig) -> None:
    if benchmark.has_fatal():
        bad = next(d for d in benchmark.diagnostics if d.severity == "fatal")
        raise CorpusError(
            f"{entry_id}/benchmark.conf is not gold: {bad.kind} on line {bad.line_no}"
        )
    unknown = [d for d in benchmark.diagnostics if d.kind == UNKNOWN_PARAMETER]
    if unknown:
        raise CorpusError(
            f"{entry_id}/benchmark.conf assigns unknown parameter "
            f"(line {unknown[0].line_no}): {unknown[0].message}"
        )


def load_corpus(
    path: str | Path,
    doc_text: str | None = None,
    schema: ParameterSchema | None = None,
) -> list[CorpusEntry]:
    """Load every entry directory under path, sorted by entry id.

    doc_text supplies the documentation embedded by the doc-augmented prompt
    arm; a per-entry doc.txt overrides it. Directories without a prompt.txt
    are skipped, so an empty directory yields an empty corpus.
    """
    root = Path(path)
    if not root.is_dir():
        raise CorpusError(f"corpus path {root} is not a directory")
    return _load_entries(root, doc_text, schema)


def _load_entries(root, doc_text, schema) -> list[CorpusEntry]:
    # root may be a Path or an importlib.resources traversable
    entries = []
    for entry_dir in sorted(root.iterdir(), key=lambda t: t.name):
        if not entry_dir.is_dir():
            continue
        prompt_file = entry_dir.joinpath("prompt.txt")
        if not prompt_file.is_file():
            continue
        entry_id = entry_dir.name
        benchmark_file = entry_dir.joinpath("benchmark.conf")
        if not benchmark_file.is_file():
            raise CorpusError(f"{entry_id}: prompt.txt present but benchmark.conf missing")
        benchmark = parse_config(
            benchmark_file.read_text(encoding="utf-8"), mode=STRICT, schema=schema
        )
        _validate_benchmark(entry_id, benchmark)

        notes_file = entry_dir.joinpath("notes.txt")
        notes = notes_file.read_text(encoding="utf-8") if notes_file.is_file() else ""
        doc_file = entry_dir.joinpath("doc.txt")
        entry_doc = doc_file.read_text(encoding="utf-8") if doc_file.is_file() else doc_text
        entries.append(
            CorpusEntry(
                prompt=PolicyPrompt(
                    prompt_id=entry_id,
                    policy_text=prompt_file.read_text(encoding="utf-8"),
                    doc_text=entry_doc,
                ),
                benchmark=benchmark,
                notes=notes,
            )
        )
    return entries


def bundled_documentation() -> str:
    """The packaged pwquality.conf parameter reference embedded into prompts."""
    return (
        resources.files("pwqeval")
        .joinpath("data/pwquality_doc.txt")
        .read_text(encoding="utf-8")
    )


def bundled_corpus(schema: ParameterSchema | None = None) -> list[CorpusEntry]:
    """The packaged policy corpus (entries p1 and p2)."""
    root = resources.files("pwqeval").joinpath("data/corpus")
    return _load_entries(root, bundled_documentation(), schema)
