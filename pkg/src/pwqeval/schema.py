"""Catalog of the real pwquality.conf parameters, their value kinds, and defaults.

The catalog is data, not code: it ships as ``data/parameters.tsv`` inside the
package (one tab-separated record per parameter), so a documentation update is
an edit to that file. Parameter names are case-sensitive; any assigned name
that is not in the catalog is, by definition, hallucinated.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cache
from importlib import resources
from typing import Iterable, Iterator, Union

INTEGER = "integer"
STRING = "string"
FLAG = "flag"

VALUE_KINDS = (INTEGER, STRING, FLAG)

_INT_TOKEN = re.compile(r"[+-]?[0-9]+")


@dataclass(frozen=True)
class IntValue:
    value: int


@dataclass(frozen=True)
class StrValue:
    value: str


@dataclass(frozen=True)
class FlagValue:
    """A valueless option; ``present=False`` models the flag being unset."""

    present: bool


# Equality across ParamValue variants is exact and never coerces:
# IntValue(8) != StrValue("8").
ParamValue = Union[IntValue, StrValue, FlagValue]

_KIND_TYPES = {INTEGER: IntValue, STRING: StrValue, FLAG: FlagValue}


class SchemaError(ValueError):
    """Raised for a malformed or inconsistent parameter catalog."""


@dataclass(frozen=True)
class ParamSpec:
    name: str
    value_kind: str
    default: ParamValue
    description: str = ""

    def __post_init__(self) -> None:
        if self.value_kind not in VALUE_KINDS:
            raise SchemaError(f"unknown value kind {self.value_kind!r} for {self.name!r}")
        if not isinstance(self.default, _KIND_TYPES[self.value_kind]):
            raise SchemaError(
                f"default for {self.name!r} does not match its {self.value_kind} kind"
            )


class ParameterSchema:
    """Ordered, immutable collection of ParamSpec records.

    Iteration order is the catalog file order and is stable across runs;
    ``len(schema)`` is the fixed real-parameter count the consistency ratios
    divide by.
    """

    def __init__(self, specs: Iterable[ParamSpec]):
        self._specs = tuple(specs)
        by_name: dict[str, ParamSpec] = {}
        for spec in self._specs:
            if spec.name in by_name:
                raise SchemaError(f"duplicate parameter {spec.name!r}")
            by_name[spec.name] = spec
        self._by_name = by_name

    def __iter__(self) -> Iterator[ParamSpec]:
        return iter(self._specs)

    def __len__(self) -> int:
        return len(self._specs)

    def __contains__(self, name: object) -> bool:
        return name in self._by_name

    def lookup(self, name: str) -> ParamSpec | None:
        """Return the spec for ``name``, or None when the name is hallucinated."""
        return self._by_name.get(name)

    def names(self) -> tuple[str, ...]:
        return tuple(spec.name for spec in self._specs)

    def defaults(self) -> dict[str, ParamValue]:
        """Fresh name-to-default map; callers may mutate their copy freely."""
        return {spec.name: spec.default for spec in self._specs}


def _parse_default(name: str, kind: str, text: str) -> ParamValue:
    if kind == INTEGER:
        if not _INT_TOKEN.fullmatch(text):
            raise SchemaError(f"{name!r}: integer default {text!r} is not a signed decimal")
        return IntValue(int(text))
    if kind == FLAG:
        if text not in ("present", "absent"):
            raise SchemaError(f"{name!r}: flag default must be 'present' or 'absent', got {text!r}")
        return FlagValue(text == "present")
    return StrValue(text)


def parse_schema_text(text: str) -> ParameterSchema:
    """Parse the tab-separated catalog format into a ParameterSchema."""
    specs = []
    for line_no, line in enumerate(text.split("\n"), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.rstrip("\n").split("\t")
        if len(fields) not in (3, 4):
            raise SchemaError(f"line {line_no}: expected 3 or 4 tab-separated fields")
        name, kind, default = fields[0], fields[1], fields[2]
        description = fields[3] if len(fields) == 4 else ""
        specs.append(ParamSpec(name, kind, _parse_default(name, kind, default), description))
    return ParameterSchema(specs)


@cache
def default_schema() -> ParameterSchema:
    """The bundled catalog, loaded once and shared (immutable after load)."""
    text = resources.files("pwqeval").joinpath("data/parameters.tsv").read_text("utf-8")
    return parse_schema_text(text)


def schema_lookup(name: str, schema: ParameterSchema | None = None) -> ParamSpec | None:
    """Spec for a real parameter name; None signals a hallucinated one."""
    return (schema or default_schema()).lookup(name)
