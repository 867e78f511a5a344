"""Acceptance suite. One test per criterion; each prints a PASS line.

The randomized criteria use fixed seeds so failures reproduce exactly.
"""

from __future__ import annotations

import io
import json
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest

import pwqeval.harness
from pwqeval.cli import run_cli
from pwqeval.corpus import bundled_corpus
from pwqeval.metrics import (
    avg_consistency,
    avg_correctness,
    hallucination_census,
    response_comparison,
)
from pwqeval.parser import (
    LENIENT,
    MALFORMED_ASSIGNMENT,
    SECTION_HEADER,
    STRICT,
    parse_config,
)
from pwqeval.schema import IntValue, default_schema, parse_schema_text
from pwqeval.semantics import (
    check_password,
    effective_policy,
    functionally_equivalent,
    load_defaults,
)

F = Fraction
GOLDEN_DIR = Path(__file__).parent / "data" / "golden"
FIXTURE_DIR = Path(__file__).parent / "data"

# Independent restatement of the documented defaults, used by the naive
# oracle below. Flags are modeled as present/absent markers.
ORACLE_DEFAULTS = {
    "difok": 1,
    "minlen": 8,
    "dcredit": 0,
    "ucredit": 0,
    "lcredit": 0,
    "ocredit": 0,
    "minclass": 0,
    "maxrepeat": 0,
    "maxsequence": 0,
    "maxclassrepeat": 0,
    "gecoscheck": 0,
    "dictcheck": 1,
    "usercheck": 1,
    "usersubstr": 0,
    "enforcing": 1,
    "retry": 1,
    "badwords": "",
    "dictpath": "",
    "enforce_for_root": "absent",
    "local_users_only": "absent",
}


def oracle_comparison(pairs1, pairs2):
    """Naive per-key walk over default-merged maps; returns the three ratios."""
    m1 = dict(ORACLE_DEFAULTS)
    for name, value in pairs1:
        m1[name] = value
    m2 = dict(ORACLE_DEFAULTS)
    for name, value in pairs2:
        m2[name] = value
    num_hal = 0
    num_same = 0
    num_same_real = 0
    all_keys = set(m1) | set(m2)
    for key in all_keys:
        if key in m1 and key in m2 and m1[key] == m2[key]:
            num_same += 1
            if key in ORACLE_DEFAULTS:
                num_same_real += 1
            else:
                num_hal += 1
    return (
        F(num_hal, 2),
        F(num_same, len(all_keys)),
        F(num_same_real, len(ORACLE_DEFAULTS)),
    )


def test_criterion_1_pseudocode_oracle_equivalence():
    rng = random.Random(1001)
    names = ["minlen", "difok", "dcredit", "retry", "check_userpass", "passwd_history"]
    values = [1, 2, 3]
    started = time.monotonic()
    for _ in range(1000):
        configs = []
        for _ in range(2):
            pairs = [
                (rng.choice(names), rng.choice(values))
                for _ in range(rng.randint(0, 6))
            ]
            configs.append(pairs)
        text1 = "".join(f"{n} = {v}\n" for n, v in configs[0])
        text2 = "".join(f"{n} = {v}\n" for n, v in configs[1])
        triple = response_comparison(parse_config(text1), parse_config(text2))
        # the oracle stores fake-parameter values as the assigned text,
        # mirroring how unknown names carry uninterpreted tokens
        expected = oracle_comparison(
            [(n, v if n in ORACLE_DEFAULTS else str(v)) for n, v in configs[0]],
            [(n, v if n in ORACLE_DEFAULTS else str(v)) for n, v in configs[1]],
        )
        got = (triple.avg_hallucinated, triple.consistency_incl_hal, triple.consistency_real)
        assert got == expected, (text1, text2, got, expected)
    elapsed = time.monotonic() - started
    assert elapsed < 5.0, f"took {elapsed:.2f}s"
    print(f"ACCEPTANCE 1 PASS: naive oracle agrees on 1000 random pairs ({elapsed:.2f}s)")


def test_criterion_2_blank_fixture_replay():
    started = time.monotonic()
    responses = [parse_config("") for _ in range(5)]
    report = avg_consistency(responses)
    census = hallucination_census(responses)
    assert report.avg_consistency_real == F(1)
    assert report.avg_hallucinated == F(0)
    assert all(entry.count == 0 for entry in census)
    elapsed = time.monotonic() - started
    assert elapsed < 1.0, f"took {elapsed:.2f}s"
    print(f"ACCEPTANCE 2 PASS: five blank responses score perfect consistency ({elapsed:.2f}s)")


def test_criterion_3_failsafe_behavior():
    parsed = parse_config("minlen=abc\ndifok=2\n")
    policy = effective_policy(parsed)
    assert policy.fell_back
    assert policy.get_int("difok") == 1
    assert policy.values == load_defaults().values
    assert functionally_equivalent(parsed, parse_config(""))
    print("ACCEPTANCE 3 PASS: invalid file falls back to the full-default policy")


def _random_config_text(rng: random.Random) -> str:
    int_names = [s.name for s in default_schema() if s.value_kind == "integer"]
    lines = []
    for _ in range(rng.randint(0, 5)):
        roll = rng.random()
        if roll < 0.70:
            lines.append(f"{rng.choice(int_names)} = {rng.randint(0, 4)}")
        elif roll < 0.80:
            lines.append(f"{rng.choice(int_names)} = junk")  # invalid -> failsafe
        elif roll < 0.90:
            lines.append(f"{rng.choice(['check_userpass', 'history', 'entropy'])} = 1")
        else:
            lines.append(rng.choice(["enforce_for_root", "local_users_only"]))
    return "".join(line + "\n" for line in lines)


def test_criterion_4_functional_equivalence_axiom_and_relation():
    assert functionally_equivalent(parse_config("minlen=8\n"), parse_config(""))

    rng = random.Random(1004)
    configs = [parse_config(_random_config_text(rng)) for _ in range(500)]
    canon = [effective_policy(c).values for c in configs]

    for c in configs:  # reflexive
        assert functionally_equivalent(c, c)
    for _ in range(500):  # symmetric, and agrees with resolved-policy equality
        a, b = rng.randrange(500), rng.randrange(500)
        fe = functionally_equivalent(configs[a], configs[b])
        assert fe == functionally_equivalent(configs[b], configs[a])
        assert fe == (canon[a] == canon[b])
    for _ in range(300):  # transitive
        a, b, c = (rng.randrange(500) for _ in range(3))
        if functionally_equivalent(configs[a], configs[b]) and functionally_equivalent(
            configs[b], configs[c]
        ):
            assert functionally_equivalent(configs[a], configs[c])
    print("ACCEPTANCE 4 PASS: explicit-default axiom; equivalence relation on 500 configs")


def _random_password(rng: random.Random) -> str:
    return "".join(chr(rng.randint(33, 126)) for _ in range(rng.randint(1, 16)))


def test_criterion_5_hallucination_tolerance():
    rng = random.Random(1005)
    for _ in range(200):
        base_text = _random_config_text(rng)
        noisy_text = base_text + "check_userpass = 1\n"
        base = effective_policy(parse_config(base_text))
        noisy = effective_policy(parse_config(noisy_text))
        assert base.values == noisy.values
        assert "check_userpass" in noisy.ignored_params
        for _ in range(50):
            password = _random_password(rng)
            assert check_password(base, password) == check_password(noisy, password)
    print("ACCEPTANCE 5 PASS: appended hallucinated parameter never changes enforcement")


MINI_SCHEMA = parse_schema_text(
    "minlen\tinteger\t8\n" "difok\tinteger\t1\n" "dcredit\tinteger\t0\n" "retry\tinteger\t1\n"
)


def _mini_configs():
    names = ["minlen", "difok", "dcredit", "retry"]
    choices = [None, 1, 2]  # absent or one of two explicit values
    configs = []
    stack = [(0, [])]
    while stack:
        index, acc = stack.pop()
        if index == len(names):
            text = "".join(f"{n} = {v}\n" for n, v in acc)
            configs.append(parse_config(text, schema=MINI_SCHEMA))
            continue
        for choice in choices:
            nxt = acc if choice is None else acc + [(names[index], choice)]
            stack.append((index + 1, nxt))
    return configs


def test_criterion_6_metric_invariants_suite():
    # exhaustive over the 4-parameter mini-schema (3^4 = 81 configs)
    configs = _mini_configs()
    assert len(configs) == 81
    for a in configs:
        triple = response_comparison(a, a, MINI_SCHEMA)
        assert triple.consistency_incl_hal == F(1)
        assert triple.consistency_real == F(1)
        score = avg_correctness([a], a, MINI_SCHEMA)
        assert score.avg_correct_real == F(1)
        assert score.missing_params_per_response == ((),)
    for a in configs:
        for b in configs:
            assert response_comparison(a, b, MINI_SCHEMA) == response_comparison(
                b, a, MINI_SCHEMA
            )

    # exhaustive monotonicity: corrupting one parameter drops the score to 3/4
    defaults = MINI_SCHEMA.defaults()
    for benchmark in configs:
        merged = dict(defaults)
        merged.update(benchmark.assignment_map())
        for name in MINI_SCHEMA.names():
            current = merged[name].value
            corrupt_value = next(v for v in (1, 2, 99) if v != current)
            corrupted_map = dict(benchmark.assignment_map())
            corrupted_map[name] = IntValue(corrupt_value)
            text = "".join(f"{n} = {v.value}\n" for n, v in corrupted_map.items())
            corrupted = parse_config(text, schema=MINI_SCHEMA)
            score = avg_correctness([corrupted], benchmark, MINI_SCHEMA)
            assert score.avg_correct_real == F(3, 4)
            assert score.avg_correct_real < F(1)

    # randomized spot checks over the full 20-parameter schema
    rng = random.Random(1006)
    int_names = [s.name for s in default_schema() if s.value_kind == "integer"]
    for _ in range(200):
        pairs = {rng.choice(int_names): rng.randint(0, 4) for _ in range(rng.randint(0, 5))}
        text = "".join(f"{n} = {v}\n" for n, v in pairs.items())
        benchmark = parse_config(text)
        assert avg_correctness([benchmark], benchmark).avg_correct_real == F(1)
        merged = load_defaults().values
        merged.update(benchmark.assignment_map())
        name = rng.choice(int_names)
        corrupt_value = next(v for v in (0, 1, 99) if IntValue(v) != merged[name])
        corrupted = parse_config(text + f"{name} = {corrupt_value}\n")
        score = avg_correctness([corrupted], benchmark)
        assert score.avg_correct_real == F(19, 20)
    print("ACCEPTANCE 6 PASS: symmetry, self-identity, and corruption monotonicity hold")


def test_criterion_7_malformed_fixture_replay():
    missing_equals = (FIXTURE_DIR / "missing_equals.conf").read_text(encoding="utf-8")
    bracket_headers = (FIXTURE_DIR / "bracket_headers.conf").read_text(encoding="utf-8")

    strict_missing = parse_config(missing_equals, mode=STRICT)
    assert MALFORMED_ASSIGNMENT in [d.kind for d in strict_missing.diagnostics]
    assert strict_missing.has_fatal()
    assert effective_policy(strict_missing).fell_back

    strict_bracket = parse_config(bracket_headers, mode=STRICT)
    assert SECTION_HEADER in [d.kind for d in strict_bracket.diagnostics]
    assert strict_bracket.has_fatal()
    assert effective_policy(strict_bracket).fell_back

    # lenient parses still feed the metrics
    lenient = [
        parse_config(missing_equals, mode=LENIENT),
        parse_config(bracket_headers, mode=LENIENT),
        parse_config("", mode=LENIENT),
    ]
    assert not any(p.has_fatal() for p in lenient)
    report = avg_consistency(lenient)
    assert F(0) <= report.avg_consistency_real <= F(1)
    score = avg_correctness(lenient, bundled_corpus()[0].benchmark)
    assert F(0) <= score.avg_correct_real <= F(1)
    print("ACCEPTANCE 7 PASS: malformed fixtures diagnose, fall back, and still score")


def test_criterion_8_end_to_end_mock_run(tmp_path, monkeypatch):
    def no_network(*args, **kwargs):
        raise AssertionError("network call attempted during mock run")

    monkeypatch.setattr(pwqeval.harness.requests, "post", no_network)
    started = time.monotonic()

    outputs = []
    for name in ("one", "two"):
        run_dir = tmp_path / name
        out, err = io.StringIO(), io.StringIO()
        code = run_cli(
            ["generate", "--provider", "mock:showcase", "--corpus", "bundled",
             "--iterations", "5", "--with-doc", "--out", str(run_dir)],
            env={}, stdout=out, stderr=err,
        )
        assert code == 0, err.getvalue()
        json_out, csv_out = io.StringIO(), io.StringIO()
        assert run_cli(["report", str(run_dir), "--corpus", "bundled", "--format", "json"],
                       env={}, stdout=json_out, stderr=io.StringIO()) == 0
        assert run_cli(["report", str(run_dir), "--corpus", "bundled", "--format", "csv"],
                       env={}, stdout=csv_out, stderr=io.StringIO()) == 0
        outputs.append((json_out.getvalue(), csv_out.getvalue()))

    assert outputs[0] == outputs[1], "repeated mock runs must emit identical reports"
    golden_json = (GOLDEN_DIR / "report.json").read_bytes()
    golden_csv = (GOLDEN_DIR / "report.csv").read_bytes()
    assert outputs[0][0].encode("utf-8") == golden_json
    assert outputs[0][1].encode("utf-8") == golden_csv

    elapsed = time.monotonic() - started
    assert elapsed < 10.0, f"took {elapsed:.2f}s"
    print(f"ACCEPTANCE 8 PASS: mock pipeline matches golden reports byte for byte ({elapsed:.2f}s)")


def test_criterion_9_simulator_spot_checks():
    defaults = load_defaults()

    result = check_password(defaults, "abc")
    assert result.verdict == "reject" and "too_short" in result.failures

    difok_policy = effective_policy(parse_config("difok = 1\n"))
    assert check_password(difok_policy, "password2", old="password1").verdict == "accept"

    dcredit_policy = effective_policy(parse_config("dcredit = -1\n"))
    assert check_password(dcredit_policy, "abcdefgh").failures == ("class_minimum_unmet",)

    explicit_lines = []
    for spec in default_schema():
        if spec.value_kind == "integer":
            explicit_lines.append(f"{spec.name} = {spec.default.value}")
        elif spec.value_kind == "string":
            explicit_lines.append(f"{spec.name} = {spec.default.value}")
    explicit = parse_config("".join(line + "\n" for line in explicit_lines))
    blank = parse_config("")
    assert functionally_equivalent(blank, explicit)

    rng = random.Random(1009)
    blank_policy = effective_policy(blank)
    explicit_policy = effective_policy(explicit)
    for _ in range(100):
        password = _random_password(rng)
        assert check_password(blank_policy, password) == check_password(
            explicit_policy, password
        )
    print("ACCEPTANCE 9 PASS: simulator spot checks and default-equivalence hold")
