"""Command line interface: ``lavrentiev {solve,rate,verify}``.

Exit codes: 0 success, 1 solver failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .experiment import (AlphaRule, Method, ProblemSpec, load_problem, rate_study,
                         run_single)
from .grid import DEFAULT_FINE_N
from .initval import NoiseModel
from .solver import SolverError
from .verify import SUITES


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _method_list(text):
    try:
        return [Method(v.strip()) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lavrentiev",
        description="Lavrent'ev-regularized reconstruction from noisy autoconvolution data.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="reconstruct one synthetic problem")
    s.add_argument("--problem", required=True, help="f1, f2 or file:PATH")
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--method", required=True, choices=[m.value for m in Method])
    s.add_argument("--sigma", type=float, default=0.0)
    alpha = s.add_mutually_exclusive_group()
    alpha.add_argument("--alpha", type=float)
    alpha.add_argument("--alpha-rule", choices=[r.value for r in AlphaRule],
                       help="a priori rule for alpha (default sqrt)")
    s.add_argument("--c", type=float, default=1.0, help="constant in the alpha rule")
    s.add_argument("--m", type=int)
    s.add_argument("--fine-n", type=int, default=DEFAULT_FINE_N)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--noise", choices=["sup", "l2"], default="sup")
    s.add_argument("--smoothness-bound", type=float,
                   help="a priori C^1 bound of the solution (L2 noise)")
    s.add_argument("--smoothing", choices=["cubic", "minimal"], default="cubic",
                   help="post-smoothing knot level for pc-smooth")
    s.add_argument("--no-plot", action="store_true")
    s.add_argument("--out", required=True)

    r = sub.add_parser("rate", help="convergence-rate study over several noise levels")
    r.add_argument("--problem", required=True, choices=["f1", "f2"])
    r.add_argument("--deltas", type=_float_list, required=True)
    r.add_argument("--methods", type=_method_list, default=list(Method))
    r.add_argument("--repeats", type=int, default=3)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--fine-n", type=int, default=DEFAULT_FINE_N)
    r.add_argument("--sigma", type=float, default=0.0)
    r.add_argument("--smoothing", choices=["cubic", "minimal"], default="cubic")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--no-plot", action="store_true")
    r.add_argument("--out", required=True)

    v = sub.add_parser("verify", help="check the numerical bounds")
    v.add_argument("--suite", choices=sorted(SUITES), action="append",
                   help="suite to run (repeatable; default all)")
    return parser


def _problem(parser, text, fine_n):
    if text in ("f1", "f2"):
        return text
    if text.startswith("file:"):
        try:
            return load_problem(text[5:], fine_n)
        except (OSError, ValueError) as exc:
            parser.error(f"cannot read problem file: {exc}")
    parser.error(f"--problem must be f1, f2 or file:PATH, got {text!r}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.command == "verify":
        ok = True
        for name in args.suite or list(SUITES):
            print(f"[{name}]")
            for check in SUITES[name]():
                print("  " + check.line())
                ok &= check.passed
        return 0 if ok else 1

    try:
        if args.command == "solve":
            spec = ProblemSpec(
                _problem(parser, args.problem, args.fine_n), args.fine_n,
                NoiseModel(args.noise, args.delta, args.seed, args.smoothness_bound),
                args.sigma)
            run = run_single(spec, args.method, alpha_rule=args.alpha_rule or AlphaRule.SQRT,
                             c=args.c, alpha=args.alpha, m=args.m, smoothing=args.smoothing,
                             out_dir=args.out, plot=not args.no_plot)
            print(f"method={run.method} delta={run.delta:g} alpha={run.alpha:.6g} m={run.m} "
                  f"x_star={run.x_star:.6g} l2_error={run.l2_error:.6g} "
                  f"residual={run.residual:.3g} time={run.wall_time:.3g}s")
        else:
            spec = ProblemSpec(args.problem, args.fine_n,
                               NoiseModel("sup", 0.0, args.seed), args.sigma)
            res = rate_study(spec, args.deltas, args.methods, args.repeats,
                             smoothing=args.smoothing, out_dir=args.out,
                             workers=args.workers, plot=not args.no_plot)
            for method, slope in res.fitted_slopes.items():
                print(f"{method}: slope {slope:.4f}")
    except ValueError as exc:
        parser.error(str(exc))
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
