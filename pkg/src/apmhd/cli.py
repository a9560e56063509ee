"""Command-line interface.

  apmhd run --problem orszag_tang --nx 96 --t-final 0.5 --out results/
  apmhd converge --problem alfven1d --resolutions 10,20,40,80,160 \\
      --dt-law accuracy53 --out conv/
  apmhd problems
"""

import argparse
import sys

from . import problems, study
from .driver import RunConfig, run


def _add_common(p):
    p.add_argument("--problem", required=True, choices=problems.available_problems())
    p.add_argument("--scheme", default="imex", choices=["imex", "erk", "erkc"])
    p.add_argument("--tableau", default="third_order_sa")
    p.add_argument("--nx", type=int, default=64)
    p.add_argument("--ny", type=int, default=None)
    p.add_argument("--cfl", type=float, default=0.25)
    p.add_argument("--epsilon", type=float, default=None,
                   help="Mach number override (default: problem value)")
    p.add_argument("--t-final", type=float, default=None)
    p.add_argument("--dt-law", default="cfl", choices=["cfl", "accuracy53"])
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--dump-every", type=int, default=0)
    p.add_argument("--elliptic-tol", type=float, default=1e-12)
    p.add_argument("--no-plots", action="store_true")


def _config(args):
    return RunConfig(
        problem=args.problem, scheme=args.scheme, tableau=args.tableau,
        nx=args.nx, ny=args.ny, cfl=args.cfl, epsilon=args.epsilon,
        t_final=args.t_final, dt_law=args.dt_law, outdir=args.out,
        dump_every=args.dump_every, elliptic_tol=args.elliptic_tol,
        plots=not args.no_plots)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="apmhd",
        description="all-Mach semi-implicit WENO solver for ideal MHD")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="time-step one problem")
    _add_common(p_run)

    p_conv = sub.add_parser("converge", help="resolution-ladder error study")
    _add_common(p_conv)
    p_conv.add_argument("--resolutions", required=True,
                        help="comma-separated node counts, e.g. 10,20,40")
    p_conv.add_argument("--reference", default="exact",
                        help="'exact' or a fine node count (nested grids)")

    sub.add_parser("problems", help="list available problems")

    args = parser.parse_args(argv)

    if args.command == "problems":
        for name in problems.available_problems():
            print(name)
        return 0

    if args.command == "run":
        result = run(_config(args))
        for k, v in result.summary.items():
            print(f"{k} = {v}")
        if result.outdir:
            print(f"outputs written to {result.outdir}")
        return 0

    if args.command == "converge":
        resolutions = [int(tok) for tok in args.resolutions.split(",")]
        cfg = _config(args)
        reports = study.convergence_study(
            cfg, resolutions, reference=args.reference, outdir=args.out)
        print(study.format_report(reports))
        if args.out:
            print(f"outputs written to {args.out}")
        return 0

    return 1


if __name__ == "__main__":
    sys.exit(main())
