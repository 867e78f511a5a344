from __future__ import annotations

from fractions import Fraction

import pytest

from pwqeval.corpus import bundled_corpus
from pwqeval.harness import MockProvider, run_generation, write_run
from pwqeval.metrics import SoundnessThresholds
from pwqeval.report import (
    CSV_COLUMNS,
    build_report,
    emit,
    fraction_decimal,
    parse_report_json,
)

F = Fraction


# decimal rendering


@pytest.mark.parametrize(
    "value,expected",
    [
        (F(1), "1.000000"),
        (F(0), "0.000000"),
        (F(1, 2), "0.500000"),
        (F(19, 20), "0.950000"),
        (F(1, 3), "0.333333"),
        (F(2, 3), "0.666667"),
        (F(1, 2000000), "0.000000"),  # exact tie rounds to even (0)
        (F(3, 2000000), "0.000002"),  # exact tie rounds to even (2)
        (F(1, 1000000), "0.000001"),
        (F(123, 1), "123.000000"),
        (F(1234567, 1000000), "1.234567"),
    ],
)
def test_fraction_decimal_six_digits_half_even(value, expected):
    assert fraction_decimal(value) == expected


# building


def make_run(tmp_path, with_doc=False, iterations=5):
    mock = MockProvider("mock-x", ["", "retry = 3\n"])
    return run_generation(
        mock,
        [e.prompt for e in bundled_corpus()],
        iterations=iterations,
        out_dir=tmp_path / "run",
        with_doc=with_doc,
        clock=lambda: "T",
    )


def test_build_report_blank_five_against_p1(tmp_path):
    mock = MockProvider("blanks", [""])
    run = run_generation(mock, [bundled_corpus()[0].prompt], iterations=5,
                         out_dir=tmp_path / "run", clock=lambda: "T")
    cells = build_report(run, bundled_corpus())
    assert len(cells) == 1
    cell = cells[0]
    assert cell.consistency.avg_consistency_real == F(1)
    assert cell.correctness.avg_correct_real == F(19, 20)  # retry=3 unmet
    assert cell.correctness.avg_correct_real < F(1)
    assert all(e.count == 0 for e in cell.census)
    assert not cell.soundness.sound


def test_build_report_empty_run(tmp_path):
    run = write_run(tmp_path / "run", [])
    assert build_report(run, bundled_corpus()) == []


def test_build_report_cells_split_by_arm(tmp_path):
    run = make_run(tmp_path, with_doc=True)
    cells = build_report(run, bundled_corpus())
    assert [(c.prompt_id, c.doc_augmented) for c in cells] == [
        ("p1", False), ("p1", True), ("p2", False), ("p2", True),
    ]
    assert all(c.model == "mock-x" for c in cells)
    assert all(c.content_digest == run.manifest["content_digest"] for c in cells)


def test_build_report_accepts_run_directory_path(tmp_path):
    run = make_run(tmp_path)
    from_path = build_report(tmp_path / "run", bundled_corpus())
    from_run = build_report(run, bundled_corpus())
    assert from_path == from_run


def test_build_report_missing_benchmark(tmp_path):
    run = make_run(tmp_path)
    with pytest.raises(ValueError):
        build_report(run, bundled_corpus()[1:])  # p1 absent


def test_build_report_rejects_single_response_cell(tmp_path):
    run = make_run(tmp_path, iterations=1)
    with pytest.raises(ValueError):
        build_report(run, bundled_corpus())


def test_build_report_honours_thresholds(tmp_path):
    run = make_run(tmp_path)
    default = build_report(run, bundled_corpus())
    relaxed = build_report(
        run, bundled_corpus(), thresholds=SoundnessThresholds(F(1, 2), F(1, 2))
    )
    assert not default[0].soundness.consistent
    assert relaxed[0].soundness.consistent


# emission


def test_emit_json_single_cell_is_array_of_one(tmp_path):
    run = make_run(tmp_path)
    cells = build_report(run, bundled_corpus())[:1]
    import json

    payload = json.loads(emit(cells, "json"))
    assert isinstance(payload, list) and len(payload) == 1
    cell = payload[0]
    assert cell["model"] == "mock-x"
    assert set(cell["avg_consistency_real"]) == {"decimal", "numerator", "denominator"}


def test_emit_csv_header_matches_documented_schema(tmp_path):
    run = make_run(tmp_path)
    cells = build_report(run, bundled_corpus())
    lines = emit(cells, "csv").decode("utf-8").splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + len(cells)


def test_emit_unknown_format(tmp_path):
    with pytest.raises(ValueError):
        emit([], "xml")


def test_emit_is_deterministic(tmp_path):
    run = make_run(tmp_path)
    cells = build_report(run, bundled_corpus())
    assert emit(cells, "json") == emit(cells, "json")
    assert emit(cells, "csv") == emit(cells, "csv")


def test_json_roundtrip_preserves_cells_exactly(tmp_path):
    run = make_run(tmp_path, with_doc=True)
    cells = build_report(run, bundled_corpus())
    recovered = parse_report_json(emit(cells, "json"))
    assert recovered == cells


def test_parse_report_json_rejects_corruption(tmp_path):
    run = make_run(tmp_path)
    cells = build_report(run, bundled_corpus())
    data = emit(cells, "json").decode("utf-8")
    with pytest.raises(ValueError):
        parse_report_json(b"{}")
    tampered = data.replace('"numerator": 19', '"numerator": 18', 1)
    if tampered != data:
        with pytest.raises(ValueError):
            parse_report_json(tampered.encode("utf-8"))
