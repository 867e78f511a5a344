"""Pairwise consistency/hallucination scoring, benchmark correctness, and the
aggregate soundness verdict.

Every ratio is an exact ``fractions.Fraction`` so that independent
recomputations can be compared with ``==``; rendering as decimals is the
report layer's job. Pairwise comparisons are pure and order-independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .parser import FALLBACK_KINDS, ParsedConfig
from .schema import ParameterSchema, default_schema

_ZERO = Fraction(0)


@dataclass(frozen=True)
class ComparisonTriple:
    """Result of comparing two responses' merged parameter maps.

    ``avg_hallucinated`` is the matched hallucinated-key count halved (an
    exact multiple of 1/2); a hallucinated key present in only one response
    contributes nothing to it. ``consistency_incl_hal`` counts agreement over
    the union of both maps' keys, ``consistency_real`` over the fixed real
    catalog only. A key present in only one map never equals anything.
    """

    avg_hallucinated: Fraction
    consistency_incl_hal: Fraction
    consistency_real: Fraction


@dataclass(frozen=True)
class ConsistencyReport:
    iterations: int
    pair_count: int
    avg_hallucinated: Fraction
    avg_consistency_incl_hal: Fraction
    avg_consistency_real: Fraction


@dataclass(frozen=True)
class CorrectnessScore:
    avg_correct_real: Fraction
    per_response: tuple[Fraction, ...]
    missing_params_per_response: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class CensusEntry:
    """Direct per-response census of hallucinated names (no halving)."""

    count: int
    names: tuple[str, ...]


@dataclass(frozen=True)
class SoundnessThresholds:
    consistency: Fraction = Fraction(1)
    correctness: Fraction = Fraction(1)

    @classmethod
    def parse(cls, text: str) -> "SoundnessThresholds":
        """Parse ``"c,k"`` with exact decimal-or-rational components."""
        parts = text.split(",")
        if len(parts) != 2:
            raise ValueError("thresholds must be two comma-separated numbers")
        try:
            return cls(Fraction(parts[0].strip()), Fraction(parts[1].strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad thresholds {text!r}: {exc}") from None


@dataclass(frozen=True)
class SoundnessVerdict:
    consistent: bool
    correct: bool
    hallucination_free: bool
    complete: bool
    sound: bool = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "sound",
            self.consistent and self.correct and self.hallucination_free and self.complete,
        )


def response_comparison(
    r1: ParsedConfig, r2: ParsedConfig, schema: ParameterSchema | None = None
) -> ComparisonTriple:
    """Score agreement between two responses over default-merged maps.

    Both maps start as the full defaults and are overlaid with the
    response's assignments (unknown names included, last assignment wins).
    """
    schema = schema or default_schema()
    m1 = schema.defaults()
    m1.update(r1.assignment_map())
    m2 = schema.defaults()
    m2.update(r2.assignment_map())

    num_hal = num_same = num_same_real = 0
    all_keys = m1.keys() | m2.keys()
    for key in all_keys:
        if key in m1 and key in m2 and m1[key] == m2[key]:
            num_same += 1
            if key in schema:
                num_same_real += 1
            else:
                num_hal += 1
    return ComparisonTriple(
        avg_hallucinated=Fraction(num_hal, 2),
        consistency_incl_hal=Fraction(num_same, len(all_keys)),
        consistency_real=Fraction(num_same_real, len(schema)),
    )


def avg_consistency(
    responses: Sequence[ParsedConfig], schema: ParameterSchema | None = None
) -> ConsistencyReport:
    """Average the comparison triple over every unordered response pair."""
    n = len(responses)
    if n < 2:
        raise ValueError("consistency needs at least two responses")
    total_hal = total_incl = total_real = _ZERO
    for a, b in combinations(responses, 2):
        triple = response_comparison(a, b, schema)
        total_hal += triple.avg_hallucinated
        total_incl += triple.consistency_incl_hal
        total_real += triple.consistency_real
    pair_count = n * (n - 1) // 2
    return ConsistencyReport(
        iterations=n,
        pair_count=pair_count,
        avg_hallucinated=total_hal / pair_count,
        avg_consistency_incl_hal=total_incl / pair_count,
        avg_consistency_real=total_real / pair_count,
    )


def _check_benchmark(benchmark: ParsedConfig) -> None:
    bad = [d for d in benchmark.diagnostics if d.kind in FALLBACK_KINDS]
    if bad:
        raise ValueError(
            f"benchmark is not clean: {bad[0].kind} on line {bad[0].line_no}"
        )


def avg_correctness(
    responses: Sequence[ParsedConfig],
    benchmark: ParsedConfig,
    schema: ParameterSchema | None = None,
) -> CorrectnessScore:
    """Real-parameter agreement of each response against a gold benchmark.

    A response's incompleteness record lists the benchmark's non-default
    assignments it omits entirely; an omitted parameter stays at its
    documented default, which is what the agreement score then judges.
    """
    if not responses:
        raise ValueError("correctness needs at least one response")
    _check_benchmark(benchmark)
    schema = schema or default_schema()
    defaults = schema.defaults()
    required = [
        name
        for name, value in benchmark.assignment_map().items()
        if name in schema and value != defaults[name]
    ]

    per_response = []
    missing_per_response = []
    for response in responses:
        per_response.append(response_comparison(response, benchmark, schema).consistency_real)
        assigned = response.assignment_map().keys()
        missing_per_response.append(tuple(n for n in required if n not in assigned))
    avg = sum(per_response, _ZERO) / len(per_response)
    return CorrectnessScore(
        avg_correct_real=avg,
        per_response=tuple(per_response),
        missing_params_per_response=tuple(missing_per_response),
    )


def hallucination_census(
    responses: Sequence[ParsedConfig], schema: ParameterSchema | None = None
) -> tuple[CensusEntry, ...]:
    """Per-response count of distinct assigned names missing from the catalog.

    This is the intuitive census, independent of the pairwise matched-only
    halved count in ComparisonTriple.
    """
    schema = schema or default_schema()
    entries = []
    for response in responses:
        names = tuple(
            name for name in dict.fromkeys(a.name for a in response.assignments)
            if name not in schema
        )
        entries.append(CensusEntry(count=len(names), names=names))
    return tuple(entries)


def verdict_from_parts(
    consistency: ConsistencyReport,
    correctness: CorrectnessScore,
    census: Sequence[CensusEntry],
    thresholds: SoundnessThresholds | None = None,
) -> SoundnessVerdict:
    """Combine already-computed metric parts into the aggregate verdict."""
    t = thresholds or SoundnessThresholds()
    return SoundnessVerdict(
        consistent=consistency.avg_consistency_real >= t.consistency,
        correct=correctness.avg_correct_real >= t.correctness,
        hallucination_free=all(entry.count == 0 for entry in census),
        complete=all(not missing for missing in correctness.missing_params_per_response),
    )


def soundness_verdict(
    responses: Sequence[ParsedConfig],
    benchmark: ParsedConfig,
    thresholds: SoundnessThresholds | None = None,
    schema: ParameterSchema | None = None,
) -> SoundnessVerdict:
    """A response set is sound when it clears all four criteria at once."""
    if len(responses) < 2:
        raise ValueError("soundness needs at least two responses")
    return verdict_from_parts(
        avg_consistency(responses, schema),
        avg_correctness(responses, benchmark, schema),
        hallucination_census(responses, schema),
        thresholds,
    )
