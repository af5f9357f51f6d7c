"""One-step evolution operators and trajectory driver.

The split schemes advance ``df/dt = A_K f`` by treating ``A_K`` as the
periodic operator ``A_L`` plus the boundary correction ``G``:

    S1(t) = exp(t A_L) exp(t G)
    S2(t) = exp(t G / 2) exp(t A_L) exp(t G / 2)

``exp(t A_L)`` costs two FFTs and ``exp(t G)`` is a tiny dense block, so a
step is O(n log n).  Euler, Crank-Nicolson and the exact exponential are
provided as baselines and as the reference for error measurements.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from . import kernels
from .boundary import BoundaryOperator, apply_boundary_exp, build_gkl, exp_boundary
from .errors import DenseCapError, SingularStepError
from .lattice import (
    Domain,
    Extension,
    Periodic,
    Stencil,
    apply_extended,
    as_grid,
    dense_matrix,
    dirichlet,
    tridiagonal_bands,
)
from .spectral import PeriodicSymbol, exp_periodic, periodic_symbol

__all__ = [
    "SchemeKind",
    "EvolutionProblem",
    "step_s1",
    "step_s2",
    "step_euler",
    "step_cn",
    "exact_step",
    "step",
    "step_matrix",
    "evolve",
    "DEFAULT_DENSE_CAP",
]

DEFAULT_DENSE_CAP = 4096
CN_RESIDUAL_TOL = 1e-10


class SchemeKind(enum.Enum):
    S1 = "s1"
    S2 = "s2"
    EULER = "euler"
    CN = "cn"
    EXACT = "exact"

    @classmethod
    def parse(cls, name) -> "SchemeKind":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        aliases = {"crank-nicolson": "cn", "kn": "cn", "exp": "exact"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            choices = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown scheme {name!r} (choose from {choices})") from None


@dataclass(frozen=True)
class EvolutionProblem:
    """``df/dt = scale * A f`` with ``A`` the stencil under extension ``ext_k``.

    ``scale=1j`` turns the diffusion problem into the Schroedinger one.
    The split schemes always use the periodic extension as reference.
    """

    stencil: Stencil
    ext_k: Extension
    domain: Domain
    scale: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "scale", complex(self.scale))

    @classmethod
    def laplacian(cls, n: int, ext: Extension | None = None, scale=1.0) -> "EvolutionProblem":
        return cls(Stencil.laplacian(), dirichlet() if ext is None else ext, Domain(n), scale)

    @property
    def n(self) -> int:
        return self.domain.n

    @property
    def ext_l(self) -> Periodic:
        return Periodic()

    @property
    def operator(self) -> Stencil:
        """The stencil with ``scale`` folded into its coefficients."""
        return self.stencil.scaled(self.scale)

    def apply(self, f) -> np.ndarray:
        """``A_K f``."""
        return apply_extended(self.operator, self.ext_k, f, self.domain)

    def matrix(self) -> np.ndarray:
        """Dense ``A_K``."""
        return dense_matrix(self.operator, self.ext_k, self.domain)

    def periodic_matrix(self) -> np.ndarray:
        """Dense ``A_L``."""
        return dense_matrix(self.operator, Periodic(), self.domain)


@lru_cache(maxsize=64)
def _symbol(p: EvolutionProblem) -> PeriodicSymbol:
    return periodic_symbol(p.operator, p.domain)


@lru_cache(maxsize=64)
def boundary_operator(p: EvolutionProblem) -> BoundaryOperator:
    """``G = A_K - A_L`` for the problem, restricted to the boundary."""
    return build_gkl(p.operator, p.ext_k, Periodic(), p.domain)


@lru_cache(maxsize=256)
def _boundary_exp(p: EvolutionProblem, theta: float):
    return exp_boundary(theta, boundary_operator(p))


def step_s1(p: EvolutionProblem, t: float, f) -> np.ndarray:
    """First-order split step ``exp(t A_L) exp(t G) f``."""
    f = as_grid(f, p.domain)
    h = apply_boundary_exp(_boundary_exp(p, float(t)), f)
    return exp_periodic(t, _symbol(p), h)


def step_s2(p: EvolutionProblem, t: float, f) -> np.ndarray:
    """Symmetric split step ``exp(t G/2) exp(t A_L) exp(t G/2) f``."""
    f = as_grid(f, p.domain)
    half = _boundary_exp(p, 0.5 * float(t))
    h = apply_boundary_exp(half, f)
    h = exp_periodic(t, _symbol(p), h)
    return apply_boundary_exp(half, h)


def step_euler(p: EvolutionProblem, t: float, f) -> np.ndarray:
    f = as_grid(f, p.domain)
    return f + t * p.apply(f)


def _bands(p: EvolutionProblem):
    return tridiagonal_bands(p.operator, p.ext_k, p.domain)


def step_cn(p: EvolutionProblem, t: float, f) -> np.ndarray:
    """Crank-Nicolson step: solve ``(E - t/2 A) h = (E + t/2 A) f``.

    Tridiagonal operators use the O(n) sweep, anything else a dense LU.
    """
    f = as_grid(f, p.domain)
    if t == 0:
        return f.copy()
    half = 0.5 * t
    rhs = f + half * p.apply(f)
    bands = _bands(p)
    # a singular system shows up as inf/nan in the solve; the residual test catches it
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"), warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        try:
            if bands is not None:
                lower, diag, upper = bands
                lo, d, up = -half * lower, 1.0 - half * diag, -half * upper
                if rhs.ndim == 1:
                    h = kernels.tridiag_solve(lo, d, up, rhs)
                else:
                    h = np.column_stack(
                        [kernels.tridiag_solve(lo, d, up, np.ascontiguousarray(c)) for c in rhs.T]
                    )
            else:
                lhs = np.eye(p.n, dtype=complex) - half * p.matrix()
                h = scipy.linalg.solve(lhs, rhs, check_finite=False)
        except (ZeroDivisionError, np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
            raise SingularStepError(f"CN resolvent singular at this t (t={t}): {exc}") from exc
        residual = np.linalg.norm(h - half * p.apply(h) - rhs)

    if not residual <= CN_RESIDUAL_TOL * max(np.linalg.norm(f), np.finfo(float).tiny):
        raise SingularStepError(f"CN resolvent singular at this t (t={t}, residual {residual:.3e})")
    return h


@lru_cache(maxsize=32)
def _hermitian_eig(p: EvolutionProblem):
    """Eigenpairs of ``A_K / scale`` when it is real symmetric, else None."""
    base = dense_matrix(p.stencil, p.ext_k, p.domain)
    if np.any(base.imag != 0) or not np.array_equal(base.real, base.real.T):
        return None
    w, v = np.linalg.eigh(base.real)
    w.setflags(write=False)
    v.setflags(write=False)
    return w, v


@lru_cache(maxsize=32)
def _expm(p: EvolutionProblem, t: float) -> np.ndarray:
    return scipy.linalg.expm(t * p.matrix())


def exact_step(p: EvolutionProblem, t: float, f, cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """``exp(t A_K) f`` computed densely; the reference for all error checks."""
    if p.n > cap:
        raise DenseCapError(f"exact step needs a dense {p.n}x{p.n} matrix (cap {cap})")
    f = as_grid(f, p.domain)
    if t == 0:
        return f.copy()
    eig = _hermitian_eig(p)
    if eig is not None:
        w, v = eig
        factor = np.exp(t * p.scale * w)
        if f.ndim == 2:
            factor = factor[:, None]
        return v @ (factor * (v.T @ f))
    return _expm(p, float(t)) @ f


_STEPS = {
    SchemeKind.S1: step_s1,
    SchemeKind.S2: step_s2,
    SchemeKind.EULER: step_euler,
    SchemeKind.CN: step_cn,
    SchemeKind.EXACT: exact_step,
}


def step(p: EvolutionProblem, scheme, t: float, f) -> np.ndarray:
    return _STEPS[SchemeKind.parse(scheme)](p, t, f)


def step_matrix(p: EvolutionProblem, scheme, t: float) -> np.ndarray:
    """Dense matrix of one step, built column by column from the identity."""
    return step(p, scheme, t, np.eye(p.n, dtype=complex))


def evolve(
    p: EvolutionProblem,
    scheme,
    dt: float,
    steps: int,
    g,
    observer: Optional[Callable[[int, float, np.ndarray], None]] = None,
) -> np.ndarray:
    """Apply ``steps`` steps of ``scheme`` to ``g``.

    ``observer(k, k * dt, state)`` is called after each step ``k = 1..steps``.
    """
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    fn = _STEPS[SchemeKind.parse(scheme)]
    f = as_grid(g, p.domain).copy()
    for k in range(1, steps + 1):
        f = fn(p, dt, f)
        if observer is not None:
            observer(k, k * dt, f)
    return f
