"""Experiment drivers behind the command line.

Each ``cmd_*`` function returns ``(header, rows)``; :func:`write_csv`
serialises them.  Floats are written with ``repr`` (shortest round-trip),
so identical inputs give byte-identical files.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .analysis import (
    DEFAULT_GATE_CAP,
    dirichlet_eigenpairs,
    dirichlet_mu,
    spectrum_report,
)
from .lattice import Domain, Stencil, ThirdKind
from .steppers import (
    DEFAULT_DENSE_CAP,
    EvolutionProblem,
    SchemeKind,
    evolve,
    exact_step,
    step,
    step_matrix,
)

EQUATIONS = {"diffusion": 1.0, "schrodinger": 1j}
BOUNDARY_PRESETS = {"dirichlet": (-1.0, -1.0), "neumann": (1.0, 1.0)}


def parse_complex(text) -> complex:
    """Accept Python complex syntax and the ``re+imi`` spelling."""
    if isinstance(text, (int, float, complex)):
        return complex(text)
    s = str(text).strip().replace(" ", "")
    if s.endswith("i"):
        s = s[:-1] + "j"
    return complex(s)


def format_complex(z) -> str:
    z = complex(z)
    sign = "+" if z.imag >= 0 or math.isnan(z.imag) else "-"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


@dataclass(frozen=True)
class RunConfig:
    n: int = 128
    dt: float = 0.5
    steps: int = 10
    scheme: SchemeKind = SchemeKind.S2
    equation: str = "diffusion"
    alpha: complex = -1.0
    beta: complex = -1.0
    initial: str = "random"
    seed: int = 0
    output: str = "-"

    def __post_init__(self):
        object.__setattr__(self, "scheme", SchemeKind.parse(self.scheme))
        if self.equation not in EQUATIONS:
            raise ValueError(f"equation must be one of {sorted(EQUATIONS)}, got {self.equation!r}")
        object.__setattr__(self, "alpha", parse_complex(self.alpha))
        object.__setattr__(self, "beta", parse_complex(self.beta))
        if self.steps < 0:
            raise ValueError(f"steps must be non-negative, got {self.steps}")

    def problem(self) -> EvolutionProblem:
        return EvolutionProblem(
            Stencil.laplacian(),
            ThirdKind(self.alpha, self.beta),
            Domain(self.n),
            EQUATIONS[self.equation],
        )

    def echo(self) -> list:
        return [
            f"n={self.n}",
            f"dt={self.dt!r}",
            f"steps={self.steps}",
            f"scheme={self.scheme.value}",
            f"equation={self.equation}",
            f"alpha={format_complex(self.alpha)}",
            f"beta={format_complex(self.beta)}",
            f"initial={self.initial}",
            f"seed={self.seed}",
        ]


def random_unit_vector(n: int, seed: int) -> np.ndarray:
    """Standard complex Gaussian, normalised: uniform on the unit sphere of C^n."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return g / np.linalg.norm(g)


def initial_vector(text: str, n: int, seed: int = 0) -> np.ndarray:
    """Build an initial grid function from ``delta[:k]``, ``random``, ``eigen:j`` or ``file:path``."""
    kind, _, arg = str(text).partition(":")
    kind = kind.strip().lower()
    if kind == "delta":
        k = int(arg) if arg else n // 2
        if not 0 <= k < n:
            raise ValueError(f"delta index {k} outside 0..{n - 1}")
        g = np.zeros(n, dtype=complex)
        g[k] = 1.0
        return g
    if kind == "random":
        return random_unit_vector(n, int(arg) if arg else seed)
    if kind == "eigen":
        j = int(arg)
        if not 0 <= j < n:
            raise ValueError(f"eigen index {j} outside 0..{n - 1}")
        return dirichlet_eigenpairs(n).phi[j].astype(complex)
    if kind == "file":
        values = np.loadtxt(arg, dtype=complex, ndmin=1,
                            converters=lambda s: parse_complex(s.decode() if isinstance(s, bytes) else s))
        if values.shape != (n,):
            raise ValueError(f"{arg}: expected {n} values, found {values.size}")
        return values
    raise ValueError(f"unknown initial condition {text!r}")


def write_csv(header: Sequence[str], rows: Iterable[Sequence], stream=None, comments: Sequence[str] = ()) -> str:
    """Write rows as LF-terminated CSV; returns the text when ``stream`` is None."""
    own = stream is None
    out = io.StringIO() if own else stream
    for line in comments:
        out.write(f"# {line}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_value(v) for v in row])
    return out.getvalue() if own else ""


def _map(fn, items, jobs: int):
    items = list(items)
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def cmd_evolve(cfg: RunConfig, dense_cap: int = DEFAULT_DENSE_CAP):
    """Rows ``step,time,rel_error,norm``; ``rel_error`` blank above the dense cap."""
    p = cfg.problem()
    g = initial_vector(cfg.initial, cfg.n, cfg.seed)
    with_ref = cfg.n <= dense_cap
    rows = [(0, 0.0, 0.0 if with_ref else None, float(np.linalg.norm(g)))]
    ref = [g]

    def observe(k, time, state):
        rel = None
        if with_ref:
            ref[0] = exact_step(p, cfg.dt, ref[0], cap=dense_cap)
            rel = float(np.linalg.norm(state - ref[0]) / np.linalg.norm(ref[0]))
        rows.append((k, time, rel, float(np.linalg.norm(state))))

    evolve(p, cfg.scheme, cfg.dt, cfg.steps, g, observe)
    return ["step", "time", "rel_error", "norm"], rows


def cmd_fig2(cfg: RunConfig, schemes=(SchemeKind.S2, SchemeKind.CN)):
    """Relative error of several schemes against the exact solution, per step.

    Rows ``step,time,<scheme>_rel_error...``.
    """
    p = cfg.problem()
    g = initial_vector(cfg.initial, cfg.n, cfg.seed)
    schemes = [SchemeKind.parse(s) for s in schemes]
    states = [g.copy() for _ in schemes]
    ref = g.copy()
    rows = [(0, 0.0) + tuple(0.0 for _ in schemes)]
    for k in range(1, cfg.steps + 1):
        ref = exact_step(p, cfg.dt, ref)
        errs = []
        for i, s in enumerate(schemes):
            states[i] = step(p, s, cfg.dt, states[i])
            errs.append(float(np.linalg.norm(states[i] - ref) / np.linalg.norm(ref)))
        rows.append((k, k * cfg.dt) + tuple(errs))
    header = ["step", "time"] + [f"{s.value}_rel_error" for s in schemes]
    return header, rows


def cmd_fig1(t: float = 0.5, n: int = 1024, gate_cap: int = DEFAULT_GATE_CAP):
    """Rows ``j,xi,mu,oe_error,cn_error`` for the even eigenvalues.

    When ``n <= gate_cap`` the roots are first checked against the dense
    spectrum of the split step (``OracleMismatchError`` above ``1e-8``).
    """
    rep = spectrum_report(t, n, "diffusion", gate=True, gate_cap=gate_cap, tol=1e-8)
    rows = [
        (j, rep.xi[j], rep.mu_even[j], rep.oe_error[j], rep.cn_error[j])
        for j in range(rep.xi.size)
    ]
    return ["j", "xi", "mu", "oe_error", "cn_error"], rows


def cmd_spectrum(t: float = 0.5, n: int = 16, equation: str = "diffusion", gate_cap: int = DEFAULT_GATE_CAP):
    """Rows ``k,parity,xi,mu,oe_error,cn_error,exact_match`` over all ``n`` eigenvalues."""
    rep = spectrum_report(t, n, equation, gate=True, gate_cap=gate_cap)
    mu = dirichlet_mu(n)
    rows = []
    for j in range(n // 2):
        rows.append((2 * j, "even", rep.xi[j], mu[2 * j], rep.oe_error[j], rep.cn_error[j], None))
        exact = None if rep.odd_exact is None else bool(rep.odd_exact[j])
        nu = rep.odd_nu[j]
        rows.append((2 * j + 1, "odd", nu, mu[2 * j + 1], abs(nu - mu[2 * j + 1]), None, exact))
    return ["k", "parity", "xi", "mu", "oe_error", "cn_error", "exact_match"], rows


def cmd_convergence(
    schemes=("s1", "s2", "euler", "cn", "exact"),
    n: int = 32,
    horizon: float = 1.0,
    dts=(1 / 8, 1 / 16, 1 / 32, 1 / 64),
    equation: str = "diffusion",
    alpha=-1.0,
    beta=-1.0,
    initial: str = "random",
    seed: int = 0,
    jobs: int = 1,
):
    """Global error at ``horizon`` for each scheme and step size.

    Rows ``scheme,dt,global_error,observed_order``; the order is
    ``log(e_prev / e) / log(dt_prev / dt)`` and blank on the first rung.
    """
    dts = [float(d) for d in dts]
    if any(b >= a for a, b in zip(dts, dts[1:])):
        raise ValueError("dt ladder must be strictly decreasing")
    counts = []
    for d in dts:
        k = round(horizon / d)
        if k < 1 or not math.isclose(k * d, horizon, rel_tol=1e-12):
            raise ValueError(f"horizon {horizon} is not a whole number of steps of {d}")
        counts.append(k)
    schemes = [SchemeKind.parse(s) for s in schemes]
    cfg = RunConfig(n=n, equation=equation, alpha=alpha, beta=beta, initial=initial, seed=seed)
    p = cfg.problem()
    g = initial_vector(initial, n, seed)
    ref = exact_step(p, horizon, g)
    scale = np.linalg.norm(ref)

    def run(item):
        s, d, k = item
        f = evolve(p, s, d, k, g)
        return float(np.linalg.norm(f - ref) / scale)

    items = [(s, d, k) for s in schemes for d, k in zip(dts, counts)]
    errors = _map(run, items, jobs)
    rows = []
    i = 0
    for s in schemes:
        prev = None
        for d in dts:
            e = errors[i]
            i += 1
            order = None
            if prev is not None and prev[1] > 0 and e > 0:
                order = math.log(prev[1] / e) / math.log(prev[0] / d)
            rows.append((s.value, d, e, order))
            prev = (d, e)
    return ["scheme", "dt", "global_error", "observed_order"], rows


def cmd_stability(
    ts=(0.1, 0.5, 1.0, 5.0),
    bcs=("dirichlet", "neumann"),
    schemes=("s1", "s2"),
    n: int = 64,
    equation: str = "diffusion",
    jobs: int = 1,
    dense_cap: int = DEFAULT_DENSE_CAP,
):
    """Operator 2-norm of each dense step matrix: rows ``bc,scheme,t,op_norm``.

    ``bcs`` entries are ``dirichlet``, ``neumann`` or ``third:alpha:beta``.
    """
    if n > dense_cap:
        raise ValueError(f"n={n} above dense cap {dense_cap}")
    schemes = [SchemeKind.parse(s) for s in schemes]
    problems = []
    for bc in bcs:
        if bc in BOUNDARY_PRESETS:
            a, b = BOUNDARY_PRESETS[bc]
        elif bc.startswith("third:"):
            _, a, b = bc.split(":")
            a, b = parse_complex(a), parse_complex(b)
        else:
            raise ValueError(f"unknown boundary condition {bc!r}")
        cfg = RunConfig(n=n, equation=equation, alpha=a, beta=b)
        problems.append((bc, cfg.problem()))

    items = [(bc, p, s, float(t)) for bc, p in problems for s in schemes for t in ts]

    def run(item):
        bc, p, s, t = item
        return float(np.linalg.norm(step_matrix(p, s, t), 2))

    norms = _map(run, items, jobs)
    rows = [(bc, s.value, t, v) for (bc, _, s, t), v in zip(items, norms)]
    return ["bc", "scheme", "t", "op_norm"], rows


__all__ = [
    "RunConfig",
    "parse_complex",
    "format_complex",
    "initial_vector",
    "random_unit_vector",
    "write_csv",
    "cmd_evolve",
    "cmd_fig1",
    "cmd_fig2",
    "cmd_spectrum",
    "cmd_convergence",
    "cmd_stability",
]
