"""Command-line entry point: ``majority-avg <command> ...``.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from . import predictors
from .counters import ALGORITHMS, RUNNERS
from .errors import DomainError, ResourceLimitError
from .figures import FIGURE_KINDS, emit_figure
from .harness import (
    VERIFY_MODES,
    ConfigError,
    ExperimentConfig,
    config_from_mapping,
    load_config,
    read_report,
    run_experiment,
    validate_report,
)
from .streams import ENUMERATION_CAP, brute_force_majority, enumerate_streams, stream_count

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def cmd_predict(args) -> int:
    pred = predictors.predict(args.algorithm, args.length, args.colours)
    if args.json:
        print(json.dumps({
            "algorithm": pred.algorithm, "n": pred.n, "m": pred.m,
            "terms": pred.terms, "extras": pred.extras,
            "expected_total": pred.expected_total,
        }, indent=2))
        return EXIT_OK
    print(f"{pred.algorithm} n={pred.n} m={pred.m}")
    for name, value in {**pred.terms, **pred.extras}.items():
        print(f"  {name:<20} {value:.10g}")
    print(f"  {'expected_total':<20} {pred.expected_total:.10g}")
    return EXIT_OK


_RUN_FLAGS = {
    "algorithms": "algorithms", "colours": "colours", "lengths": "lengths",
    "trials": "trials", "seed": "seed", "out": "out", "workers": "workers",
    "z": "z", "verify": "verify",
}


def cmd_run(args) -> int:
    values = load_config(args.config) if args.config else {}
    for flag, key in _RUN_FLAGS.items():
        v = getattr(args, flag)
        if v is not None:
            values[key] = str(v)
    if "out" not in values:
        raise UsageError("run needs an output path (--out or 'out' in the config file)")
    config = config_from_mapping(values, ExperimentConfig())
    report = run_experiment(config)
    print(f"wrote {len(report.rows)} rows to {config.output_path}")
    return EXIT_OK


def cmd_validate(args) -> int:
    report = read_report(args.input)
    if args.algorithm:
        report.rows = [r for r in report.rows if r.algorithm in args.algorithm]
    if not report.rows:
        raise UsageError("report has no rows to validate")
    verdict = validate_report(
        report, max_rel_err_pct=args.max_rel_err,
        min_ci_fraction=args.min_ci_frac, min_length=args.min_length,
    )
    for line in verdict.lines():
        print(line)
    return EXIT_OK if verdict.passed else EXIT_FAIL


def cmd_figures(args) -> int:
    report = read_report(args.input)
    svg, sidecar = emit_figure(report, args.kind, args.out, length=args.length)
    print(f"wrote {svg} and {sidecar}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    n, m = args.length, args.colours
    if args.what == "zeros":
        exact = predictors.expected_zeros_exact(n, m)
        print(f"expected_zeros_exact n={n} m={m}: {exact:.12g}")
        if m >= 3:
            heur = predictors.heuristic_zeros(n, m)
            rel = abs(heur - exact) / exact if exact else math.nan
            print(f"heuristic n(m-2)/(2m-2): {heur:.12g} (relative gap {rel:.3e})")
        return EXIT_OK
    if args.what == "pmaj":
        print(f"{predictors.majority_probability(n, m):.15g}")
        return EXIT_OK
    if args.what == "rho":
        print(f"{predictors.majority_proportion_rho(n, m):.15g}")
        return EXIT_OK

    # enumerate
    total = stream_count(n, m)
    if total > ENUMERATION_CAP:
        raise ResourceLimitError(f"{m}**{n} = {total} streams exceeds enumeration cap {ENUMERATION_CAP}")
    if not args.check_all:
        print(f"{total} streams of length {n} over {m} colours")
        if total <= 64:
            for s in enumerate_streams(n, m):
                print(" ".join(map(str, s.colours)) or "(empty)")
        return EXIT_OK
    mismatches = {a: 0 for a in ALGORITHMS}
    worst = {a: 0 for a in ALGORITHMS}
    for s in enumerate_streams(n, m):
        truth = brute_force_majority(s)
        for a in ALGORITHMS:
            res = RUNNERS[a](s.colours)
            mismatches[a] += res.majority != truth
            worst[a] = max(worst[a], res.tally.total)
    print(f"checked {total} streams of length {n} over {m} colours")
    bounds = {
        "mjrty": 2 * n - 1,
        "fischer_salzberg": math.ceil(3 * n / 2) - 1,
        "tournament": math.ceil(3 * n / 2) - 2,
    }
    for a in ALGORITHMS:
        print(f"  {a:<17} mismatches={mismatches[a]} max_total={worst[a]} bound={max(bounds[a], 0)}")
    return EXIT_OK if not any(mismatches.values()) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="majority-avg",
        description="Simulate and predict comparison counts of majority algorithms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="print the predicted comparison count and its terms")
    p.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    p.add_argument("--colours", type=int, required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("run", help="simulate an experiment grid and write a report")
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--algorithms", help="comma separated subset of " + ",".join(ALGORITHMS))
    p.add_argument("--colours", help="comma separated colour counts")
    p.add_argument("--lengths", help="start:stop:step (inclusive)")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="report path; .json selects JSON, anything else CSV")
    p.add_argument("--workers", type=int)
    p.add_argument("--z", type=float, help="CI quantile (default 2.5758)")
    p.add_argument("--verify", choices=VERIFY_MODES)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="check a report against relative-error and CI thresholds")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--max-rel-err", type=float, default=0.5, help="percent (default 0.5)")
    p.add_argument("--min-ci-frac", type=float, default=0.95)
    p.add_argument("--min-length", type=int, default=0,
                   help="only cells with n >= this enter the mean relative error")
    p.add_argument("--algorithm", action="append", choices=ALGORITHMS)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("oracle", help="exact oracles")
    p.add_argument("what", choices=("zeros", "enumerate", "rho", "pmaj"))
    p.add_argument("--colours", type=int, required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--check-all", action="store_true",
                   help="with enumerate: run every algorithm on every stream")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("figures", help="draw an SVG chart plus sidecar CSV from a report")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    p.add_argument("--out", required=True)
    p.add_argument("--length", type=int, help="fixed n for cross_colour (default: largest)")
    p.set_defaults(func=cmd_figures)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError, DomainError, ResourceLimitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
