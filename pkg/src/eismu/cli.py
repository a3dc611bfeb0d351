"""Command-line interface.

Exit codes: 0 success, 1 a check failed or a formula was refused, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .arith import (
    DEFAULT_PRECISION,
    DEFAULT_QEXP_TERMS,
    DEFAULT_SERIES_DEGREE,
    SetupParams,
    validate_prime_and_weight,
)
from .errors import CriteriaNotMetError, DomainError, EismuError, ValidationError

EXIT_OK, EXIT_FAILED, EXIT_SETUP = 0, 1, 2


def _params(args, k0=None) -> SetupParams:
    return SetupParams(args.N, args.p, args.k0 if k0 is None else k0,
                       padic_precision=args.precision,
                       series_degree=args.series_degree,
                       qexp_terms=args.qexp_terms)


def _emit(obj, as_json: bool, lines=None):
    if as_json:
        print(json.dumps(obj, indent=2, sort_keys=False))
    else:
        for line in lines if lines is not None else [f"{k}: {v}" for k, v in obj.items()]:
            print(line)


def cmd_check(args) -> int:
    from .criteria import full_report

    report = full_report(_params(args))
    _emit(report.to_json(), args.json)
    return EXIT_OK


def cmd_mu(args) -> int:
    from .criteria import full_report
    from .eisenstein import constant_term_valuation
    from .iwasawa import weight_parameter
    from .padic import val_p

    params = _params(args)
    k = args.k
    weight_parameter(params.p, params.k0, k, 1)          # congruence-class check
    report = full_report(params)
    if not report.up_minus_one_generates:
        raise CriteriaNotMetError(f"mu-sum formula not licensed ({report.reason})", report.reason)
    predicted = val_p(params.N - 1, params.p) + val_p(k, params.p)
    constant_term = constant_term_valuation(params, k)
    out = {
        "N": params.N, "p": params.p, "k0": params.k0, "k": k,
        "mu_sum": predicted,
        "lambda": 0,
        "formula": "val_p(N-1) + val_p(k)",
        "constant_term_valuation": constant_term,
        "agrees": predicted == constant_term,
    }
    if k == 2:
        from .modsym import localize_level, modsym_precision, mu_sum_weight2

        M = min(args.precision, modsym_precision(params.p))
        w2 = mu_sum_weight2(params, localize_level(params, M))
        out["mu_sum_w2_modsym"] = w2
        out["agrees"] = out["agrees"] and w2 == predicted
    _emit(out, args.json)
    return EXIT_OK if out["agrees"] else EXIT_FAILED


def cmd_survey(args) -> int:
    from .survey import default_cache_path, render, run_survey, summarize

    if args.with_rank and args.k0 != 2:
        raise ValidationError("--with-rank needs k0 = 2")
    validate_prime_and_weight(args.p, args.k0)
    cache = None if args.no_cache else (args.cache or default_cache_path(args.p, args.k0))
    jobs = args.jobs or os.cpu_count() or 1

    def progress(row):
        if args.verbose:
            print(f"N={row.N} rank={row.rank} classes={row.class_count} ({row.wall_time_ms} ms)",
                  file=sys.stderr)

    rows = run_survey(args.p, args.k0, args.max_N, with_rank=args.with_rank, jobs=jobs,
                      cache_path=cache, progress=progress)
    text = render(rows, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    summary = summarize(rows)
    print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    return EXIT_FAILED if summary["undetermined"] else EXIT_OK


def cmd_qexp(args) -> int:
    from .eisenstein import eisenstein_pm_qexp

    sign = {"plus": 1, "minus": -1}[args.sign]
    if args.p < 5:
        raise ValidationError(f"p={args.p} must be a prime >= 5")
    params = _params(args, k0=args.k % (args.p - 1))
    terms = args.terms if args.terms is not None else params.qexp_terms
    print(json.dumps(eisenstein_pm_qexp(args.k, sign, params, terms).to_json()))
    return EXIT_OK


def cmd_modsym(args) -> int:
    from .criteria import full_report
    from .modsym import (
        Undetermined,
        class_count,
        eigenvalues_rank_one,
        localize_level,
        modsym_precision,
        mu_sum_from_block,
    )

    params = _params(args)
    M = min(args.precision, modsym_precision(params.p))
    data = localize_level(params, M)
    cc = class_count(data)
    report = full_report(params)
    eig = None
    if args.eigen or data.dimension == 1:
        if data.dimension == 1:
            eig = {str(q): a for q, a in eigenvalues_rank_one(data, args.eigen_primes).items()}
    out = {
        "N": params.N,
        "p": params.p,
        "k0": params.k0,
        "dim_full": data.dim_full,
        "dim_cusp": data.dim_cusp,
        "rank": data.dimension,
        "class_count": "undetermined" if cc is Undetermined else cc,
        "eigenvalues": eig,
        "mu_sum_w2": mu_sum_from_block(data) if report.up_minus_one_generates else None,
        "char_polys": {f"T_{q}": c for q, c in data.char_polys.items()},
    }
    print(json.dumps(out, indent=2))
    if args.eigen and eig is None:
        print(f"eigenvalues need a rank-one block (rank {data.dimension})", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_axioms(args) -> int:
    from .axiomatics import selftest

    if not args.selftest:
        print("nothing to do: pass --selftest", file=sys.stderr)
        return EXIT_SETUP
    results = selftest(seed=args.seed, trials=args.trials)
    width = max(len(k) for k in results)
    failed = 0
    for name, (ok, bad) in results.items():
        failed += bad
        print(f"{name:<{width}}  {'PASS' if bad == 0 else 'FAIL'}  {ok} passed, {bad} failed")
    return EXIT_OK if failed == 0 else EXIT_FAILED


def cmd_version(args) -> int:
    print(__version__)
    return EXIT_OK


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the flags with suppressed defaults so that a value
    # given before the subcommand is not overwritten
    def default(value):
        return argparse.SUPPRESS if suppress else value

    flags = argparse.ArgumentParser(add_help=False)
    flags.add_argument("--precision", type=int, default=default(DEFAULT_PRECISION),
                       help=f"p-adic working precision in digits (default {DEFAULT_PRECISION})")
    flags.add_argument("--series-degree", type=int, default=default(DEFAULT_SERIES_DEGREE),
                       help=f"truncation degree of weight-variable series (default {DEFAULT_SERIES_DEGREE})")
    flags.add_argument("--qexp-terms", type=int, default=default(DEFAULT_QEXP_TERMS),
                       help=f"number of q-expansion coefficients (default {DEFAULT_QEXP_TERMS})")
    flags.add_argument("--jobs", type=int, default=default(None),
                       help="worker processes (default: logical cores)")
    return flags


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags(suppress=True)
    parser = argparse.ArgumentParser(prog="eismu", parents=[_global_flags(suppress=False)],
                                     description="Eisenstein congruence criteria and Iwasawa invariants")
    sub = parser.add_subparsers(dest="command", required=True)

    def triple(p, k0_required=True):
        p.add_argument("--N", type=int, required=True)
        p.add_argument("--p", type=int, required=True)
        if k0_required:
            p.add_argument("--k0", type=int, required=True)
        p.add_argument("--json", action="store_true")

    p = sub.add_parser("check", parents=[common], help="criteria report for a triple")
    triple(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("mu", parents=[common], help="predicted mu-sum and lambda at weight k")
    triple(p)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_mu)

    p = sub.add_parser("survey", parents=[common], help="survey of levels N < max-N")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k0", type=int, default=2)
    p.add_argument("--max-N", dest="max_N", type=int, default=5000)
    p.add_argument("--with-rank", action="store_true")
    p.add_argument("--cache", default=None, help="cache file (default under $EISMU_CACHE_DIR)")
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    p.add_argument("--output", default=None)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_survey)

    p = sub.add_parser("qexp", parents=[common], help="q-expansion of E^+-_k")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--sign", choices=("plus", "minus"), default="minus")
    p.add_argument("--terms", type=int, default=None)
    p.set_defaults(func=cmd_qexp)

    p = sub.add_parser("modsym", parents=[common], help="Eisenstein-local modular symbols data")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k0", type=int, default=2)
    p.add_argument("--eigen", action="store_true", help="print T_q eigenvalues (rank one only)")
    p.add_argument("--eigen-primes", type=int, nargs="+", default=[2, 3, 7, 13])
    p.set_defaults(func=cmd_modsym)

    p = sub.add_parser("axioms", parents=[common], help="self-test of the axiomatic models")
    p.add_argument("--selftest", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("version", help="print the package version")
    p.set_defaults(func=cmd_version)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SETUP
    except CriteriaNotMetError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except EismuError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
