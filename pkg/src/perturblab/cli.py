"""Command line entry point.

Exit codes: 0 success, 1 verification failure, 2 usage or argument error,
3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Optional

from .experiments import SET_TYPES, STRATEGIES, ExperimentConfig, generate_set, run_incidence, run_perturb
from .perturbation import DomainError, collapse_summary
from .scalar import parse_scalar
from .sets import PointSet, ResourceCapError, enumeration_cap
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def _scalar(text: str) -> Fraction:
    try:
        return parse_scalar(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact scalar: {text!r}") from None


def _x(text: str):
    return "auto" if text == "auto" else _scalar(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="perturblab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, strategy=False, set_type=True):
        p.add_argument("--n", type=int, required=True, help="set size")
        p.add_argument("--x", type=_x, default="auto", help='left end of [x, 2x), "p/q" or "auto" = n^3')
        p.add_argument("--eps", type=_scalar, default=Fraction(1, 2), help='epsilon as "p/q"')
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", type=Path, default=None, help="output file (default stdout)")
        p.add_argument("--cap", type=int, default=None, help="enumeration cap (else $PERTURBLAB_CAP)")
        if set_type:
            p.add_argument("--type", choices=SET_TYPES, default="random", dest="set_type")
        if strategy:
            p.add_argument("--strategy", choices=STRATEGIES, default="zero")

    gen = sub.add_parser("gen", help="write a point set as CSV")
    common(gen)

    col = sub.add_parser("collapse", help="closed-form collapse adversary")
    common(col, set_type=False)

    per = sub.add_parser("perturb", help="|A+A| + |P| for one adversary strategy")
    common(per, strategy=True)

    inc = sub.add_parser("incidence", help="curve family incidence report")
    common(inc)
    inc.add_argument("--delta", type=_scalar, default=None, help="override the grid spacing")
    inc.add_argument("--input", type=Path, default=None, help="point set CSV instead of a generated set")
    inc.add_argument("--threads", type=int, default=1, help="worker processes for the pair sweep")

    ver = sub.add_parser("verify", help="run property suites")
    ver.add_argument("--suite", choices=SUITES + ("all",), default="all")
    ver.add_argument("--out", type=Path, default=None)
    return parser


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _json(data: dict) -> str:
    return json.dumps(data, indent=2) + "\n"


def _config(args, **extra) -> ExperimentConfig:
    try:
        return ExperimentConfig(
            n=args.n,
            epsilon=args.eps,
            x=args.x,
            seed=args.seed,
            out=str(args.out) if args.out else None,
            **extra,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _guard(work: int, cap: Optional[int], what: str) -> None:
    limit = enumeration_cap(cap)
    if work > limit:
        raise ResourceCapError(f"{what} needs {work} steps, cap is {limit}")


def cmd_generate(args) -> int:
    cfg = _config(args, set_type=args.set_type)
    _guard(cfg.n, args.cap, "generation")
    A = generate_set(cfg.set_type, cfg.n, cfg.resolved_x, cfg.seed)
    _emit(A.to_csv(), args.out)
    return EXIT_OK


def cmd_collapse(args) -> int:
    cfg = _config(args, strategy="collapse")
    _guard(cfg.n ** 2, args.cap, "collapse")
    _emit(_json(collapse_summary(cfg.resolved_x, cfg.n, cfg.epsilon)), args.out)
    return EXIT_OK


def cmd_perturb(args) -> int:
    cfg = _config(args, strategy=args.strategy, set_type=args.set_type)
    _guard(cfg.n ** 2, args.cap, "perturbation")
    _emit(_json(run_perturb(cfg)), args.out)
    return EXIT_OK


def cmd_incidence(args) -> int:
    cfg = _config(args, set_type=args.set_type, delta_override=args.delta, threads=max(1, args.threads))
    A = PointSet.from_csv(args.input.read_text()) if args.input else None
    size = len(A) if A is not None else cfg.n
    _guard(comb(size * size, 2), args.cap, "the curve-pair sweep")
    report = run_incidence(cfg, A).to_json()
    _emit(_json(report), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    tallies = run_suite(args.suite)
    lines = [t.line() for t in tallies]
    ok = all(t.ok for t in tallies)
    lines.append(f"{'PASS' if ok else 'FAIL'} suite {args.suite}: {sum(t.ok for t in tallies)}/{len(tallies)} invariants")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "gen": cmd_generate,
    "collapse": cmd_collapse,
    "perturb": cmd_perturb,
    "incidence": cmd_incidence,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ResourceCapError as exc:
        print(f"perturblab: resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, DomainError, ValueError, OSError) as exc:
        print(f"perturblab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
