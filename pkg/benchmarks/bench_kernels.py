"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints one line per (kernel, backend) with the best wall time and the
speed-up over the Python backend.
"""
import argparse
import timeit

import numpy as np

from bpexp import kernels
from bpexp.analysis import dispersion_solve, dispersion_solve_schrodinger
from bpexp.lattice import Domain, Stencil, dirichlet, tridiagonal_bands


def cases(n_tri: int, n_disp: int):
    lower, diag, upper = tridiagonal_bands(Stencil.laplacian().scaled(1j), dirichlet(), Domain(n_tri))
    half = 0.25
    lo, d, up = -half * lower, 1.0 - half * diag, -half * upper
    rng = np.random.default_rng(0)
    rhs = rng.standard_normal(n_tri) + 1j * rng.standard_normal(n_tri)
    return {
        f"tridiag_solve n={n_tri}": lambda mod, name: mod.tridiag_solve(lo, d, up, rhs),
        f"dispersion_solve n={n_disp}": lambda mod, name: dispersion_solve(0.5, n_disp, backend=name),
        f"dispersion_solve_schrodinger n={n_disp // 4}": lambda mod, name: dispersion_solve_schrodinger(
            0.5, n_disp // 4, validate=False, backend=name
        ),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n-tri", type=int, default=4096)
    ap.add_argument("--n-disp", type=int, default=1024)
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled backend not built; timing the Python backend only")
    for label, fn in cases(args.n_tri, args.n_disp).items():
        best = {}
        for name, mod in sorted(backends.items()):
            fn(mod, name)  # warm caches
            best[name] = min(timeit.repeat(lambda: fn(mod, name), number=1, repeat=args.repeat))
        for name, t in best.items():
            speedup = best["python"] / t
            print(f"{label:<40} {name:<7} {t * 1e3:10.3f} ms  x{speedup:6.1f}")


if __name__ == "__main__":
    main()
