"""Command-line interface: ``bpexp <subcommand> [options]``.

Exit status is 0 on success, 2 on a usage error and 3 when a numerical
step fails (root bracketing, dense-oracle gate, singular solve).
"""
from __future__ import annotations

import argparse
import sys

from . import experiments as ex
from .errors import NumericalError
from .steppers import SchemeKind

EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _floats(text):
    try:
        return [float(eval_fraction(v)) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def eval_fraction(text: str) -> float:
    """Parse ``0.25``, ``1/4`` or ``2^-3``."""
    s = text.strip()
    if "^" in s:
        base, exp = s.split("^")
        return float(base) ** float(exp)
    if "/" in s:
        num, den = s.split("/")
        return float(num) / float(den)
    return float(s)


def _names(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def _scheme(text):
    try:
        return SchemeKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _complex(text):
    try:
        return ex.parse_complex(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _add_common(p, **defaults):
    p.add_argument("--n", type=int, default=defaults.get("n", 128), help="number of lattice points")
    p.add_argument("--dt", type=float, default=defaults.get("dt", 0.5), help="time step")
    p.add_argument("--steps", type=int, default=defaults.get("steps", 10))
    p.add_argument("--scheme", type=_scheme, default=defaults.get("scheme", SchemeKind.S2),
                   help="s1, s2, euler, cn or exact")
    p.add_argument("--equation", choices=sorted(ex.EQUATIONS), default=defaults.get("equation", "diffusion"))
    p.add_argument("--alpha", type=_complex, default=-1.0, help="left third-kind coefficient")
    p.add_argument("--beta", type=_complex, default=-1.0, help="right third-kind coefficient")
    p.add_argument("--initial", default=defaults.get("initial", "random"),
                   help="delta[:k], random, eigen:j or file:path")
    p.add_argument("--seed", type=int, default=0)


def _add_output(p):
    p.add_argument("--out", default="-", help="output CSV path ('-' for stdout)")
    p.add_argument("--echo-config", action="store_true", help="prefix the CSV with '#' config lines")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers for parameter sweeps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bpexp",
        description="Boundary-perturbation exponential time stepping for 1-D difference problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="run one scheme and report error against the exact solution")
    _add_common(p)
    _add_output(p)

    p = sub.add_parser("fig2", help="Schroedinger relative error of S2 and CN (preset of evolve)")
    _add_common(p, n=128, dt=0.5, steps=4000, equation="schrodinger")
    p.add_argument("--schemes", type=_names, default=["s2", "cn"])
    _add_output(p)

    p = sub.add_parser("fig1", help="even-eigenvalue errors of S2 vs Crank-Nicolson")
    p.add_argument("--t", "--dt", dest="t", type=float, default=0.5)
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--gate-cap", type=int, default=ex.DEFAULT_GATE_CAP,
                   help="largest n checked against the dense spectrum")
    _add_output(p)

    p = sub.add_parser("spectrum", help="full interleaved spectrum of S2 for the Dirichlet Laplacian")
    p.add_argument("--t", "--dt", dest="t", type=float, default=0.5)
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--equation", choices=sorted(ex.EQUATIONS), default="diffusion")
    p.add_argument("--gate-cap", type=int, default=ex.DEFAULT_GATE_CAP)
    _add_output(p)

    p = sub.add_parser("convergence", help="global error and observed order over a dt ladder")
    p.add_argument("--schemes", type=_names, default=["s1", "s2", "euler", "cn", "exact"])
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--horizon", type=float, default=1.0, help="final time T")
    p.add_argument("--dt-ladder", type=_floats, default=[1 / 8, 1 / 16, 1 / 32, 1 / 64],
                   help="comma-separated decreasing steps, e.g. 1/8,1/16,1/32")
    p.add_argument("--equation", choices=sorted(ex.EQUATIONS), default="diffusion")
    p.add_argument("--alpha", type=_complex, default=-1.0)
    p.add_argument("--beta", type=_complex, default=-1.0)
    p.add_argument("--initial", default="random")
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)

    p = sub.add_parser("stability", help="operator norms of dense step matrices")
    p.add_argument("--t-grid", type=_floats, default=[0.1, 0.5, 1.0, 5.0])
    p.add_argument("--bcs", type=_names, default=["dirichlet", "neumann"],
                   help="dirichlet, neumann or third:alpha:beta")
    p.add_argument("--schemes", type=_names, default=["s1", "s2"])
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--equation", choices=sorted(ex.EQUATIONS), default="diffusion")
    _add_output(p)
    return parser


def _run(args):
    comments = []
    if args.command in ("evolve", "fig2"):
        cfg = ex.RunConfig(
            n=args.n, dt=args.dt, steps=args.steps, scheme=args.scheme, equation=args.equation,
            alpha=args.alpha, beta=args.beta, initial=args.initial, seed=args.seed, output=args.out,
        )
        comments = cfg.echo()
        if args.command == "evolve":
            header, rows = ex.cmd_evolve(cfg)
        else:
            header, rows = ex.cmd_fig2(cfg, args.schemes)
    elif args.command == "fig1":
        comments = [f"t={args.t!r}", f"n={args.n}"]
        header, rows = ex.cmd_fig1(args.t, args.n, args.gate_cap)
    elif args.command == "spectrum":
        comments = [f"t={args.t!r}", f"n={args.n}", f"equation={args.equation}"]
        header, rows = ex.cmd_spectrum(args.t, args.n, args.equation, args.gate_cap)
    elif args.command == "convergence":
        comments = [f"n={args.n}", f"horizon={args.horizon!r}", f"seed={args.seed}"]
        header, rows = ex.cmd_convergence(
            args.schemes, args.n, args.horizon, args.dt_ladder, args.equation,
            args.alpha, args.beta, args.initial, args.seed, args.jobs,
        )
    else:
        comments = [f"n={args.n}", f"equation={args.equation}"]
        header, rows = ex.cmd_stability(
            args.t_grid, args.bcs, args.schemes, args.n, args.equation, args.jobs,
        )
    return header, rows, comments


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        header, rows, comments = _run(args)
    except NumericalError as exc:
        print(f"bpexp {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"bpexp {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if not args.echo_config:
        comments = []
    if args.out == "-":
        ex.write_csv(header, rows, sys.stdout, comments)
    else:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            ex.write_csv(header, rows, fh, comments)
    return 0


if __name__ == "__main__":
    sys.exit(main())
