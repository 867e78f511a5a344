"""Command-line interface.

Subcommands: lint, compare, consistency, correctness, soundness, simulate,
generate, report. stdout carries data, stderr carries notes and errors.

Exit codes: 0 success; 1 a check failed (lint fatal, unsound set, rejected
password); 2 usage or input error; 3 io or provider failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence, TextIO

from . import corpus as corpus_mod
from . import harness, metrics, report as report_mod, semantics
from .parser import LENIENT, STRICT, ParsedConfig, parse_config

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # raise instead of exiting so run_cli owns every exit code
    def error(self, message: str) -> None:
        raise _UsageError(message)


def _decimal(value: Fraction) -> str:
    return report_mod.fraction_decimal(value)


def _number(value: Fraction) -> dict:
    return {
        "decimal": _decimal(value),
        "numerator": value.numerator,
        "denominator": value.denominator,
    }


def _read_config(path: str, mode: str) -> ParsedConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), mode=mode)


def _configs_from_dir(path: str) -> list[tuple[str, ParsedConfig]]:
    root = Path(path)
    if not root.is_dir():
        raise _UsageError(f"{path} is not a directory")
    pairs = []
    for file in sorted(root.glob("*.conf")):
        pairs.append((file.name, parse_config(file.read_text(encoding="utf-8"), mode=LENIENT)))
    return pairs


def _emit_json(obj: object, stdout: TextIO) -> None:
    stdout.write(json.dumps(obj, indent=2) + "\n")


def _cmd_lint(args, env, stdout, stderr) -> int:
    mode = LENIENT if args.lenient else STRICT
    parsed = _read_config(args.file, mode)
    for diag in parsed.diagnostics:
        stdout.write(f"{args.file}:{diag.line_no}: {diag.severity} {diag.kind}: {diag.message}\n")
    return EXIT_CHECK_FAILED if parsed.has_fatal() else EXIT_OK


def _cmd_compare(args, env, stdout, stderr) -> int:
    a = _read_config(args.a, LENIENT)
    b = _read_config(args.b, LENIENT)
    triple = metrics.response_comparison(a, b)
    equivalent = semantics.functionally_equivalent(a, b)
    if args.json:
        _emit_json(
            {
                "equivalent": equivalent,
                "avg_hallucinated": _number(triple.avg_hallucinated),
                "consistency_incl_hal": _number(triple.consistency_incl_hal),
                "consistency_real": _number(triple.consistency_real),
            },
            stdout,
        )
    else:
        stdout.write(f"equivalent: {str(equivalent).lower()}\n")
        stdout.write(f"avg_hallucinated: {_decimal(triple.avg_hallucinated)}\n")
        stdout.write(f"consistency_incl_hal: {_decimal(triple.consistency_incl_hal)}\n")
        stdout.write(f"consistency_real: {_decimal(triple.consistency_real)}\n")
    return EXIT_OK


def _cmd_consistency(args, env, stdout, stderr) -> int:
    pairs = _configs_from_dir(args.dir)
    result = metrics.avg_consistency([parsed for _, parsed in pairs])
    if args.json:
        _emit_json(
            {
                "iterations": result.iterations,
                "pair_count": result.pair_count,
                "avg_hallucinated": _number(result.avg_hallucinated),
                "avg_consistency_incl_hal": _number(result.avg_consistency_incl_hal),
                "avg_consistency_real": _number(result.avg_consistency_real),
            },
            stdout,
        )
    else:
        stdout.write(f"iterations: {result.iterations}\n")
        stdout.write(f"pair_count: {result.pair_count}\n")
        stdout.write(f"avg_hallucinated: {_decimal(result.avg_hallucinated)}\n")
        stdout.write(f"avg_consistency_incl_hal: {_decimal(result.avg_consistency_incl_hal)}\n")
        stdout.write(f"avg_consistency_real: {_decimal(result.avg_consistency_real)}\n")
    return EXIT_OK


def _correctness_parts(args):
    pairs = _configs_from_dir(args.dir)
    benchmark = _read_config(args.benchmark, STRICT)
    score = metrics.avg_correctness([parsed for _, parsed in pairs], benchmark)
    return pairs, benchmark, score


def _cmd_correctness(args, env, stdout, stderr) -> int:
    pairs, _, score = _correctness_parts(args)
    if args.json:
        _emit_json(
            {
                "avg_correct_real": _number(score.avg_correct_real),
                "responses": [
                    {
                        "file": name,
                        "correct_real": _number(value),
                        "missing_params": list(missing),
                    }
                    for (name, _), value, missing in zip(
                        pairs, score.per_response, score.missing_params_per_response
                    )
                ],
            },
            stdout,
        )
    else:
        stdout.write(f"avg_correct_real: {_decimal(score.avg_correct_real)}\n")
        for (name, _), value, missing in zip(
            pairs, score.per_response, score.missing_params_per_response
        ):
            suffix = f" missing: {','.join(missing)}" if missing else ""
            stdout.write(f"{name}: {_decimal(value)}{suffix}\n")
    return EXIT_OK


def _cmd_soundness(args, env, stdout, stderr) -> int:
    pairs = _configs_from_dir(args.dir)
    responses = [parsed for _, parsed in pairs]
    benchmark = _read_config(args.benchmark, STRICT)
    thresholds = (
        metrics.SoundnessThresholds.parse(args.thresholds)
        if args.thresholds
        else metrics.SoundnessThresholds()
    )
    consistency = metrics.avg_consistency(responses)
    correctness = metrics.avg_correctness(responses, benchmark)
    census = metrics.hallucination_census(responses)
    verdict = metrics.verdict_from_parts(consistency, correctness, census, thresholds)
    if args.json:
        _emit_json(
            {
                "avg_consistency_real": _number(consistency.avg_consistency_real),
                "avg_correct_real": _number(correctness.avg_correct_real),
                "max_census_count": max((e.count for e in census), default=0),
                "consistent": verdict.consistent,
                "correct": verdict.correct,
                "hallucination_free": verdict.hallucination_free,
                "complete": verdict.complete,
                "sound": verdict.sound,
            },
            stdout,
        )
    else:
        stdout.write(f"avg_consistency_real: {_decimal(consistency.avg_consistency_real)}\n")
        stdout.write(f"avg_correct_real: {_decimal(correctness.avg_correct_real)}\n")
        stdout.write(f"max_census_count: {max((e.count for e in census), default=0)}\n")
        for label, flag in (
            ("consistent", verdict.consistent),
            ("correct", verdict.correct),
            ("hallucination_free", verdict.hallucination_free),
            ("complete", verdict.complete),
            ("sound", verdict.sound),
        ):
            stdout.write(f"{label}: {str(flag).lower()}\n")
    return EXIT_OK if verdict.sound else EXIT_CHECK_FAILED


def _cmd_simulate(args, env, stdout, stderr) -> int:
    parsed = _read_config(args.config, STRICT)
    policy = semantics.effective_policy(parsed)
    if policy.fell_back:
        stderr.write("note: config file is invalid; failsafe defaults are in effect\n")
    if policy.ignored_params:
        stderr.write(f"note: ignored unknown parameters: {', '.join(policy.ignored_params)}\n")
    wordlist = semantics.load_wordlist(args.dict) if args.dict else None
    result = semantics.check_password(
        policy, args.password, old=args.old, username=args.user, wordlist=wordlist
    )
    if result.verdict == semantics.ACCEPT:
        stdout.write("accept\n")
        return EXIT_OK
    stdout.write(f"reject: {','.join(result.failures)}\n")
    return EXIT_CHECK_FAILED


def _make_provider(spec: str, env: Mapping[str, str]) -> harness.Provider:
    kind, _, detail = spec.partition(":")
    if kind == "mock":
        if not detail:
            raise _UsageError("mock provider needs mock:<script.json> or a bundled name")
        path = Path(detail)
        if not path.suffix and not path.exists():
            from importlib import resources

            bundled = resources.files("pwqeval").joinpath(f"data/mock_scripts/{detail}.json")
            if not bundled.is_file():
                raise _UsageError(f"no bundled mock script named {detail!r}")
            with resources.as_file(bundled) as real:
                return harness.MockProvider.from_script(real)
        return harness.MockProvider.from_script(path)
    if kind == "openai":
        if not detail:
            raise _UsageError("openai provider needs openai:<model>")
        return harness.OpenAIChatProvider(model=detail, env=env)
    raise _UsageError(f"unknown provider {spec!r} (expected mock:... or openai:...)")


def _load_corpus_arg(path: str) -> list[corpus_mod.CorpusEntry]:
    if path == "bundled":
        return corpus_mod.bundled_corpus()
    return corpus_mod.load_corpus(path, doc_text=corpus_mod.bundled_documentation())


def _cmd_generate(args, env, stdout, stderr) -> int:
    provider = _make_provider(args.provider, env)
    entries = _load_corpus_arg(args.corpus)
    if not entries:
        raise _UsageError(f"corpus {args.corpus!r} has no entries")
    run = harness.run_generation(
        provider,
        [entry.prompt for entry in entries],
        iterations=args.iterations,
        out_dir=args.out,
        with_doc=args.with_doc,
    )
    stderr.write(
        f"generated {len(run.records)} records"
        f" ({len(run.failures)} failures) in {args.out}\n"
    )
    return EXIT_IO if run.failures else EXIT_OK


def _cmd_report(args, env, stdout, stderr) -> int:
    entries = _load_corpus_arg(args.corpus)
    thresholds = (
        metrics.SoundnessThresholds.parse(args.thresholds) if args.thresholds else None
    )
    cells = report_mod.build_report(args.run_dir, entries, thresholds=thresholds)
    stdout.write(report_mod.emit(cells, args.format).decode("utf-8"))
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="pwqeval", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lint", help="print diagnostics for one config file")
    p.add_argument("file")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--strict", action="store_true", default=True)
    group.add_argument("--lenient", action="store_true")
    p.set_defaults(handler=_cmd_lint)

    p = sub.add_parser("compare", help="pairwise agreement of two config files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_compare)

    p = sub.add_parser("consistency", help="pairwise agreement over dir/*.conf")
    p.add_argument("dir")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_consistency)

    p = sub.add_parser("correctness", help="agreement of dir/*.conf with a benchmark")
    p.add_argument("dir")
    p.add_argument("--benchmark", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_correctness)

    p = sub.add_parser("soundness", help="aggregate verdict; exit 1 when unsound")
    p.add_argument("dir")
    p.add_argument("--benchmark", required=True)
    p.add_argument("--thresholds", metavar="C,K", help="consistency,correctness minima")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_soundness)

    p = sub.add_parser("simulate", help="check one password against a config")
    p.add_argument("config")
    p.add_argument("--password", required=True)
    p.add_argument("--old")
    p.add_argument("--user")
    p.add_argument("--dict", help="wordlist file, one word per line")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("generate", help="generate responses into a run directory")
    p.add_argument("--provider", required=True, help="mock:<script> or openai:<model>")
    p.add_argument("--corpus", required=True, help="corpus directory, or 'bundled'")
    p.add_argument("--iterations", type=int, default=5)
    p.add_argument("--with-doc", action="store_true", help="also run the doc-augmented arm")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_generate)

    p = sub.add_parser("report", help="emit per-cell metrics for a stored run")
    p.add_argument("run_dir")
    p.add_argument("--corpus", required=True, help="corpus directory, or 'bundled'")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--thresholds", metavar="C,K")
    p.set_defaults(handler=_cmd_report)

    return parser


def run_cli(
    argv: Sequence[str],
    env: Mapping[str, str] | None = None,
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
) -> int:
    env = os.environ if env is None else env
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except _UsageError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # argparse --help
        return int(exc.code or 0)
    try:
        return args.handler(args, env, stdout, stderr)
    except _UsageError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except harness.ProviderError as exc:
        stderr.write(f"provider error: {exc}\n")
        return EXIT_IO
    except OSError as exc:
        stderr.write(f"io error: {exc}\n")
        return EXIT_IO
    except ValueError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
