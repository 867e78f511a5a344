"""Aggregates per-cell metrics over a stored run and emits JSON/CSV reports.

A cell is one (model, prompt_id, doc_augmented) group of responses. Emission
is deterministic: identical cell lists produce byte-identical output. JSON
carries every ratio twice, as a 6-digit decimal string (round-half-even) and
as an exact numerator/denominator pair; CSV carries the decimal strings.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .corpus import CorpusEntry
from .harness import StoredRun, load_run
from .metrics import (
    CensusEntry,
    ConsistencyReport,
    CorrectnessScore,
    SoundnessThresholds,
    SoundnessVerdict,
    avg_consistency,
    avg_correctness,
    hallucination_census,
    verdict_from_parts,
)
from .parser import LENIENT, parse_config
from .schema import ParameterSchema

CSV_COLUMNS = (
    "model",
    "prompt_id",
    "doc_augmented",
    "iterations",
    "pair_count",
    "avg_hallucinated",
    "avg_consistency_incl_hal",
    "avg_consistency_real",
    "avg_correct_real",
    "hallucinated_names",
    "max_census_count",
    "missing_params",
    "consistent",
    "correct",
    "hallucination_free",
    "complete",
    "sound",
)


@dataclass(frozen=True)
class CellResult:
    model: str
    prompt_id: str
    doc_augmented: bool
    consistency: ConsistencyReport
    correctness: CorrectnessScore
    census: tuple[CensusEntry, ...]
    soundness: SoundnessVerdict
    content_digest: str


def fraction_decimal(value: Fraction) -> str:
    """Render an exact rational as a 6-fractional-digit decimal string."""
    with localcontext() as ctx:
        ctx.prec = 50
        quotient = Decimal(value.numerator) / Decimal(value.denominator)
        return str(quotient.quantize(Decimal("0.000001"), rounding=ROUND_HALF_EVEN))


def build_report(
    run: StoredRun | str | Path,
    corpus: Sequence[CorpusEntry],
    thresholds: SoundnessThresholds | None = None,
    schema: ParameterSchema | None = None,
) -> list[CellResult]:
    """One CellResult per (model, prompt_id, doc_augmented) group, sorted.

    Every prompt_id in the run must have a corpus benchmark. Lenient parsing
    is used on responses so malformed files still enter the metrics. A cell
    with fewer than two responses has no pairwise consistency and is an
    error.
    """
    if not isinstance(run, StoredRun):
        run = load_run(run)
    benchmarks = {entry.prompt.prompt_id: entry.benchmark for entry in corpus}

    cells: dict[tuple[str, str, bool], list] = {}
    for record in run.records:
        cells.setdefault((record.model, record.prompt_id, record.doc_augmented), []).append(
            record
        )

    results = []
    for (model, prompt_id, doc_augmented) in sorted(cells):
        if prompt_id not in benchmarks:
            raise ValueError(f"run references prompt_id {prompt_id!r} absent from corpus")
        group = sorted(cells[(model, prompt_id, doc_augmented)], key=lambda r: r.iteration_index)
        if len(group) < 2:
            raise ValueError(
                f"cell ({model!r}, {prompt_id!r}, doc={doc_augmented}) has "
                f"{len(group)} response(s); at least two are needed"
            )
        responses = [parse_config(r.extracted_config, mode=LENIENT, schema=schema) for r in group]
        consistency = avg_consistency(responses, schema)
        correctness = avg_correctness(responses, benchmarks[prompt_id], schema)
        census = hallucination_census(responses, schema)
        results.append(
            CellResult(
                model=model,
                prompt_id=prompt_id,
                doc_augmented=doc_augmented,
                consistency=consistency,
                correctness=correctness,
                census=census,
                soundness=verdict_from_parts(consistency, correctness, census, thresholds),
                content_digest=run.manifest["content_digest"],
            )
        )
    return results


def _number(value: Fraction) -> dict:
    return {
        "decimal": fraction_decimal(value),
        "numerator": value.numerator,
        "denominator": value.denominator,
    }


def _cell_to_json(cell: CellResult) -> dict:
    return {
        "model": cell.model,
        "prompt_id": cell.prompt_id,
        "doc_augmented": cell.doc_augmented,
        "iterations": cell.consistency.iterations,
        "pair_count": cell.consistency.pair_count,
        "avg_hallucinated": _number(cell.consistency.avg_hallucinated),
        "avg_consistency_incl_hal": _number(cell.consistency.avg_consistency_incl_hal),
        "avg_consistency_real": _number(cell.consistency.avg_consistency_real),
        "avg_correct_real": _number(cell.correctness.avg_correct_real),
        "per_response_correct": [_number(v) for v in cell.correctness.per_response],
        "missing_params_per_response": [
            list(names) for names in cell.correctness.missing_params_per_response
        ],
        "census": [{"count": e.count, "names": list(e.names)} for e in cell.census],
        "soundness": {
            "consistent": cell.soundness.consistent,
            "correct": cell.soundness.correct,
            "hallucination_free": cell.soundness.hallucination_free,
            "complete": cell.soundness.complete,
            "sound": cell.soundness.sound,
        },
        "content_digest": cell.content_digest,
    }


def _bool_text(flag: bool) -> str:
    return "true" if flag else "false"


def _cell_to_row(cell: CellResult) -> list[str]:
    hal_names = sorted({name for entry in cell.census for name in entry.names})
    missing = list(
        dict.fromkeys(
            name
            for names in cell.correctness.missing_params_per_response
            for name in names
        )
    )
    return [
        cell.model,
        cell.prompt_id,
        _bool_text(cell.doc_augmented),
        str(cell.consistency.iterations),
        str(cell.consistency.pair_count),
        fraction_decimal(cell.consistency.avg_hallucinated),
        fraction_decimal(cell.consistency.avg_consistency_incl_hal),
        fraction_decimal(cell.consistency.avg_consistency_real),
        fraction_decimal(cell.correctness.avg_correct_real),
        ";".join(hal_names),
        str(max((entry.count for entry in cell.census), default=0)),
        ";".join(missing),
        _bool_text(cell.soundness.consistent),
        _bool_text(cell.soundness.correct),
        _bool_text(cell.soundness.hallucination_free),
        _bool_text(cell.soundness.complete),
        _bool_text(cell.soundness.sound),
    ]


def emit(report: Sequence[CellResult], format: str) -> bytes:
    """Serialize a cell list. format is "json" or "csv". Deterministic."""
    if format == "json":
        payload = [_cell_to_json(c) for c in report]
        return (json.dumps(payload, indent=2) + "\n").encode("utf-8")
    if format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for cell in report:
            writer.writerow(_cell_to_row(cell))
        return buffer.getvalue().encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")


def _fraction_from_json(obj: dict) -> Fraction:
    value = Fraction(obj["numerator"], obj["denominator"])
    if fraction_decimal(value) != obj["decimal"]:
        raise ValueError(f"decimal/rational mismatch in report: {obj!r}")
    return value


def parse_report_json(data: bytes) -> list[CellResult]:
    """Rebuild exact CellResults from emit(..., "json") output."""
    payload = json.loads(data.decode("utf-8"))
    if not isinstance(payload, list):
        raise ValueError("not a recognised report document (expected a JSON array)")
    cells = []
    for obj in payload:
        consistency = ConsistencyReport(
            iterations=obj["iterations"],
            pair_count=obj["pair_count"],
            avg_hallucinated=_fraction_from_json(obj["avg_hallucinated"]),
            avg_consistency_incl_hal=_fraction_from_json(obj["avg_consistency_incl_hal"]),
            avg_consistency_real=_fraction_from_json(obj["avg_consistency_real"]),
        )
        correctness = CorrectnessScore(
            avg_correct_real=_fraction_from_json(obj["avg_correct_real"]),
            per_response=tuple(_fraction_from_json(v) for v in obj["per_response_correct"]),
            missing_params_per_response=tuple(
                tuple(names) for names in obj["missing_params_per_response"]
            ),
        )
        census = tuple(
            CensusEntry(count=e["count"], names=tuple(e["names"])) for e in obj["census"]
        )
        stored = obj["soundness"]
        soundness = SoundnessVerdict(
            consistent=stored["consistent"],
            correct=stored["correct"],
            hallucination_free=stored["hallucination_free"],
            complete=stored["complete"],
        )
        if soundness.sound != stored["sound"]:
            raise ValueError("soundness flag inconsistent with its parts")
        cells.append(
            CellResult(
                model=obj["model"],
                prompt_id=obj["prompt_id"],
                doc_augmented=obj["doc_augmented"],
                consistency=consistency,
                correctness=correctness,
                census=census,
                soundness=soundness,
                content_digest=obj["content_digest"],
            )
        )
    return cells
