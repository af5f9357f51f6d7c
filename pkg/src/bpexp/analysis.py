"""Error functionals and spectral analysis of the split schemes.

Most of this module concerns the second difference with Dirichlet
conditions on an even number of points ``n = 2M``.  There the
symmetric split step has two families of eigenvalues:

* ``exp(t nu_l)``, ``l = 1..M``, shared exactly with ``exp(t A_D)``
  (the odd harmonics, which the boundary correction never sees);
* ``exp(t xi_j)``, ``j = 0..M-1``, where ``xi_j`` solves a secular
  equation with one root between each pair of consecutive periodic
  eigenvalues ``nu_j = -4 sin^2(pi j / n)``.

The secular equation is solved by bisection in :mod:`bpexp.kernels`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import kernels
from .boundary import embed
from .errors import BracketError, NumericalError, OracleMismatchError
from .lattice import Domain, Stencil, dirichlet
from .steppers import (
    EvolutionProblem,
    SchemeKind,
    boundary_operator,
    exact_step,
    step,
    step_matrix,
)

__all__ = [
    "DirichletEigenpairs",
    "SpectrumReport",
    "dirichlet_eigenpairs",
    "dirichlet_mu",
    "periodic_nu",
    "one_step_error",
    "leading_error_oe",
    "leading_error_classical",
    "commutator_error_constant",
    "dispersion_function",
    "dispersion_solve",
    "dispersion_function_schrodinger",
    "dispersion_solve_schrodinger",
    "cn_dispersion_error",
    "dense_spectrum",
    "match_multisets",
    "spectrum_report",
    "DISPERSION_FORMS",
]

RESIDUAL_TOL = 1e-10
BISECT_MAX_ITER = 2000
DEFAULT_GATE_CAP = 1024

# "corrected": the j = 0 term is 1 / (1 - exp(-t xi)), i.e. the general
#   summand with nu_0 = 0; this is what the dense spectrum satisfies.
# "printed":   the j = 0 term is 1 / (1 - exp(t xi)).
DISPERSION_FORMS = ("corrected", "printed")


def dirichlet_mu(n: int) -> np.ndarray:
    """Eigenvalues ``-4 sin^2(pi (j+1) / 2n)`` of the Dirichlet Laplacian, decreasing."""
    j = np.arange(n)
    return -4.0 * np.sin(np.pi * (j + 1) / (2 * n)) ** 2


def periodic_nu(n: int, count: Optional[int] = None) -> np.ndarray:
    """``nu_j = -4 sin^2(pi j / n)`` for ``j = 0..count-1``."""
    j = np.arange(n if count is None else count)
    return -4.0 * np.sin(np.pi * j / n) ** 2


@dataclass(frozen=True, eq=False)
class DirichletEigenpairs:
    """Closed-form eigenpairs of the Dirichlet Laplacian.

    ``phi[j]`` is the unit eigenvector for ``mu[j]``.
    """

    mu: np.ndarray
    phi: np.ndarray
    sigma: np.ndarray

    @property
    def n(self) -> int:
        return self.mu.shape[0]


def dirichlet_eigenpairs(n: int) -> DirichletEigenpairs:
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    j = np.arange(n)[:, None]
    k = np.arange(n)[None, :]
    sigma = np.full(n, 2.0)
    sigma[-1] = 1.0
    phi = np.sqrt(sigma[:, None] / n) * np.sin(np.pi * (j + 1) / n * (k + 0.5))
    return DirichletEigenpairs(mu=dirichlet_mu(n), phi=phi, sigma=sigma)


def one_step_error(p: EvolutionProblem, scheme, t: float, g) -> float:
    """``|| S(t) g - exp(t A_K) g ||`` for one step of ``scheme``."""
    return float(np.linalg.norm(step(p, scheme, t, g) - exact_step(p, t, g)))


def leading_error_oe(order: int, j: int, t: float, n: int) -> float:
    """Leading one-step error of S1/S2 on the Dirichlet eigenvector ``phi_j``.

    Odd ``j`` gives zero.  For even ``j``, with ``mu = mu_j`` and
    ``sigma = sigma_j``::

        order 1:  t^2 / 2  * sqrt(2/n) * sqrt(-sigma mu (1 + (3+mu)^2))
        order 2:  t^3 / 12 * sqrt(2/n) * sqrt(-sigma mu (1 + 4 (3+mu)^2 + (mu^2 + 5 mu + 7)^2))

    These are ``||[A, G] phi|| t^2/2`` and the nested-commutator term
    evaluated in closed form; they assume the boundary stencils at the
    two ends do not overlap (``n >= 6``).
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    if not 0 <= j < n:
        raise ValueError(f"need 0 <= j < n, got j={j}, n={n}")
    if n < 6:
        raise ValueError(f"closed form needs n >= 6, got n={n}")
    if j % 2:
        return 0.0
    mu = float(dirichlet_mu(n)[j])
    sigma = 1.0 if j == n - 1 else 2.0
    b = 3.0 + mu
    if order == 1:
        inner = 1.0 + b * b
        coef = t**2 / 2.0
    else:
        inner = 1.0 + 4.0 * b * b + (mu * mu + 5.0 * mu + 7.0) ** 2
        coef = t**3 / 12.0
    return coef * math.sqrt(2.0 / n) * math.sqrt(-sigma * mu * inner)


def leading_error_classical(order: int, mu: float, t: float) -> float:
    """Leading Euler (order 1) or Crank-Nicolson (order 2) error on a unit eigenvector."""
    if order == 1:
        return mu * mu * t * t / 2.0
    if order == 2:
        return abs(mu) ** 3 * t**3 / 12.0
    raise ValueError(f"order must be 1 or 2, got {order}")


def commutator_error_constant(p: EvolutionProblem, order: int, g) -> float:
    """Coefficient of ``t^2`` (order 1) or ``t^3`` (order 2) in the split-step error.

    order 1: ``||[A, G] g|| / 2``
    order 2: ``||([A, [A, G]] - [G, [A, G]] / 2) g|| / 12``
    """
    a = p.matrix()
    gop = boundary_operator(p)
    gm = embed(gop.matrix, gop.indices, p.n)
    g = np.asarray(g, dtype=complex)

    def comm(x, y):
        return x @ y - y @ x

    ag = comm(a, gm)
    if order == 1:
        return 0.5 * float(np.linalg.norm(ag @ g))
    if order == 2:
        nested = comm(a, ag) - 0.5 * comm(gm, ag)
        return float(np.linalg.norm(nested @ g)) / 12.0
    raise ValueError(f"order must be 1 or 2, got {order}")


def _secular_terms(n: int):
    """Poles ``nu_0..nu_{M-1}`` and bracket weights ``1, (4 + nu_j) / 2``."""
    Domain(n).require_even()
    m = n // 2
    poles = periodic_nu(n, m)
    weights = np.empty(m)
    weights[0] = 1.0
    weights[1:] = 0.5 * (4.0 + poles[1:])
    return m, np.ascontiguousarray(poles), np.ascontiguousarray(weights)


def _check_form(form: str) -> bool:
    if form not in DISPERSION_FORMS:
        raise ValueError(f"form must be one of {DISPERSION_FORMS}, got {form!r}")
    return form == "printed"


def dispersion_function(xi, t: float, n: int, form: str = "corrected"):
    """Residual of the real secular equation at ``xi`` (root where zero).

    ``(1 - e^{2t}) / M * [1/(1 - e^{-t xi}) + 1/2 sum_{j=1}^{M-1} (4+nu_j)/(1 - e^{t(nu_j - xi)})] - 1``

    The ``"printed"`` form replaces the first term by ``1/(1 - e^{t xi})``.
    """
    flip = _check_form(form)
    m, poles, weights = _secular_terms(n)
    pref = -math.expm1(2.0 * t) / m
    xs = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.array(
        [kernels.secular_eval(float(x), t, poles, weights, pref, kernels.FORM_EXP, flip) for x in xs]
    )
    return out if np.ndim(xi) else float(out[0])


def _inward(lo: float, hi: float, rel: float = 1e-12):
    w = hi - lo
    a = max(lo + rel * w, np.nextafter(lo, np.inf))
    b = min(hi - rel * w, np.nextafter(hi, -np.inf))
    return a, b


def _run_bisection(lo, hi, t, poles, weights, pref, form, flip, backend):
    impl = kernels if backend is None else kernels.available_backends()[backend]
    roots, status = impl.bisect_roots(
        np.ascontiguousarray(lo, dtype=float),
        np.ascontiguousarray(hi, dtype=float),
        float(t),
        poles,
        weights,
        float(pref),
        form,
        bool(flip),
        BISECT_MAX_ITER,
    )
    bad = np.nonzero(status)[0]
    if bad.size:
        k = int(bad[0])
        raise BracketError(
            f"bracket failure: no sign change on ({float(lo[k])!r}, {float(hi[k])!r}) (interval {k})",
            interval=(float(lo[k]), float(hi[k])),
            index=k,
        )
    return np.asarray(roots)


def dispersion_solve(t: float, n: int, form: str = "corrected", backend: str | None = None) -> np.ndarray:
    """The ``M = n/2`` roots ``xi_j`` of the real secular equation.

    Root ``j`` is searched in ``(nu_{j+1}, nu_j)`` with ``nu_M = -4``.  The
    lowest root can sit below ``-4`` when ``n`` is large, so its lower
    bracket end is pushed down until the residual changes sign.

    Raises
    ------
    BracketError
        An interval shows no sign change (this is what the ``"printed"``
        form does on the first interval).
    NumericalError
        A root's residual exceeds ``1e-10``.
    """
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    flip = _check_form(form)
    m, poles, weights = _secular_terms(n)
    pref = -math.expm1(2.0 * t) / m
    edges = periodic_nu(n, m + 1)
    lo = np.empty(m)
    hi = np.empty(m)
    for j in range(m):
        lo[j], hi[j] = _inward(edges[j + 1], edges[j])
    lo[-1] = edges[m]

    def f(x):
        return kernels.secular_eval(float(x), t, poles, weights, pref, kernels.FORM_EXP, flip)

    f_top = f(hi[-1])
    step_down = 0.25
    while f(lo[-1]) * f_top > 0 and step_down < 1e3:
        lo[-1] = edges[m] - step_down
        step_down *= 2.0

    roots = _run_bisection(lo, hi, t, poles, weights, pref, kernels.FORM_EXP, flip, backend)
    res = np.abs(dispersion_function(roots, t, n, form))
    worst = int(np.argmax(res))
    if not res[worst] <= RESIDUAL_TOL:
        raise NumericalError(f"root {worst} residual {res[worst]:.3e} exceeds {RESIDUAL_TOL}")
    return roots


def dispersion_function_schrodinger(xi, t: float, n: int):
    """Residual of the unitary-case secular equation.

    ``tan(t) / M * [-1/tan(t xi / 2) + 1/2 sum_{j=1}^{M-1} (4+nu_j)/tan(t (nu_j - xi) / 2)] - 1``
    """
    m, poles, weights = _secular_terms(n)
    pref = math.tan(t) / m
    xs = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.array(
        [kernels.secular_eval(float(x), t, poles, weights, pref, kernels.FORM_TAN, False) for x in xs]
    )
    return out if np.ndim(xi) else float(out[0])


def _check_schrodinger_t(t: float):
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if abs(math.cos(t)) < 1e-8 or abs(math.sin(t)) < 1e-8:
        raise NumericalError(f"degenerate t={t}: tan(t) is infinite or zero")


def dispersion_solve_schrodinger(
    t: float,
    n: int,
    validate: bool = True,
    validate_cap: int = DEFAULT_GATE_CAP,
    backend: str | None = None,
) -> np.ndarray:
    """Roots ``xi_j`` with ``exp(i t xi_j)`` the remaining eigenvalues of the unitary S2.

    ``xi`` is only defined modulo ``2 pi / t``; roots are returned in the
    window ``(-2 pi / t, 0)``, one between each pair of consecutive poles,
    ordered from the top.  With ``validate`` (and ``n <= validate_cap``)
    every root is checked against the dense spectrum to ``1e-6``.
    """
    _check_schrodinger_t(t)
    m, poles, weights = _secular_terms(n)
    period = 2.0 * math.pi / t
    wrapped = poles - period * np.ceil(poles / period)
    wrapped[np.isclose(wrapped, 0.0, atol=1e-14)] = 0.0
    if np.unique(wrapped).size != m or np.any(wrapped[1:] == 0.0):
        raise NumericalError(f"degenerate t={t}: poles coincide modulo 2*pi/t")
    order = np.argsort(-wrapped, kind="stable")
    tops = wrapped[order]
    bottoms = np.append(tops[1:], -period)
    lo = np.empty(m)
    hi = np.empty(m)
    for k in range(m):
        lo[k], hi[k] = _inward(bottoms[k], tops[k])

    pref = math.tan(t) / m
    roots = _run_bisection(lo, hi, t, poles, weights, pref, kernels.FORM_TAN, False, backend)

    if validate and n <= validate_cap:
        p = EvolutionProblem(Stencil.laplacian(), dirichlet(), Domain(n), 1j)
        dense = np.linalg.eigvals(step_matrix(p, SchemeKind.S2, t))
        lam = np.exp(1j * t * roots)
        dist = np.min(np.abs(lam[:, None] - dense[None, :]), axis=1)
        if np.max(dist) > 1e-6:
            k = int(np.argmax(dist))
            raise OracleMismatchError(f"root {k} misses the dense spectrum by {dist[k]:.3e}")
    return roots


def cn_dispersion_error(t: float, n: int) -> np.ndarray:
    """Per-mode eigenvalue error of Crank-Nicolson for the Dirichlet Laplacian.

    ``|ln((1 + t mu/2) / (1 - t mu/2)) / t - mu|`` for every ``mu_j``.
    A mode that CN annihilates exactly (``t mu / 2 = -1``, e.g. ``mu = -4``
    at ``t = 1/2``) has infinite error; a negative factor is an error.
    """
    mu = dirichlet_mu(n)
    a = 0.5 * t * mu
    if np.any((1.0 + a) / (1.0 - a) < 0):
        raise NumericalError(f"CN amplification factor negative at t={t} (need |t mu / 2| <= 1)")
    # (2/t) (atanh(a) - a); series for small |a| to avoid cancellation
    small = np.abs(a) < 1e-3
    a2 = a * a
    series = a * a2 * (1.0 / 3 + a2 * (1.0 / 5 + a2 * (1.0 / 7 + a2 / 9)))
    with np.errstate(divide="ignore"):
        diff = np.where(small, series, np.arctanh(np.where(small, 0.0, a)) - a)
    return np.abs(2.0 / t * diff)


def dense_spectrum(p: EvolutionProblem, scheme, t: float) -> np.ndarray:
    """Eigenvalues of the dense step matrix (Hermitian solver when it applies)."""
    s = step_matrix(p, scheme, t)
    if np.allclose(s, s.conj().T, rtol=0, atol=1e-13):
        return np.linalg.eigvalsh(0.5 * (s + s.conj().T)).astype(complex)
    return np.linalg.eigvals(s)


def match_multisets(a, b) -> float:
    """Largest distance in the best one-to-one pairing of two point sets."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"multisets differ in size: {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    if np.all(a.imag == 0) and np.all(b.imag == 0):
        return float(np.max(np.abs(np.sort(a.real) - np.sort(b.real))))
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(np.max(cost[r, c]))


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    """Even/odd split of the symmetric split step's spectrum.

    Even index ``2j``: root ``xi[j]``, reference ``mu_even[j] = mu_{2j}``,
    ``oe_error = |xi - mu_even|`` and the Crank-Nicolson error at ``mu_{2j}``.
    Odd index ``2j+1``: eigenvalue ``exp(t nu_{j+1})`` and whether the dense
    spectrum contains it (``None`` when no dense check ran).
    """

    t: float
    n: int
    equation: str
    xi: np.ndarray
    mu_even: np.ndarray
    oe_error: np.ndarray
    cn_error: np.ndarray
    odd_nu: np.ndarray
    odd_exact: Optional[np.ndarray]
    dense_mismatch: Optional[float]
    residual_corrected: np.ndarray
    residual_printed: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        """Interleaved ``lambda_0..lambda_{n-1}`` predicted from the roots."""
        unit = 1j if self.equation == "schrodinger" else 1.0
        lam = np.empty(self.n, dtype=complex)
        lam[0::2] = np.exp(unit * self.t * self.xi)
        lam[1::2] = np.exp(unit * self.t * self.odd_nu)
        return lam


def spectrum_report(
    t: float,
    n: int,
    equation: str = "diffusion",
    gate: bool = True,
    gate_cap: int = DEFAULT_GATE_CAP,
    tol: float = 1e-8,
) -> SpectrumReport:
    """Solve the secular equation and, if ``gate``, check it against the dense spectrum.

    Raises
    ------
    OracleMismatchError
        The predicted eigenvalues miss the dense spectrum by more than ``tol``.
    """
    if equation not in ("diffusion", "schrodinger"):
        raise ValueError(f"equation must be 'diffusion' or 'schrodinger', got {equation!r}")
    Domain(n).require_even()
    m = n // 2
    schro = equation == "schrodinger"
    if schro:
        xi = dispersion_solve_schrodinger(t, n, validate=False)
    else:
        xi = dispersion_solve(t, n)
    mu = dirichlet_mu(n)
    mu_even = mu[0::2]
    odd_nu = periodic_nu(n, m + 1)[1:]
    if schro:
        residual_corrected = np.abs(dispersion_function_schrodinger(xi, t, n))
        residual_printed = residual_corrected
        cn_err = np.abs(2.0 / t * np.arctan(0.5 * t * mu_even) - mu_even)
    else:
        residual_corrected = np.abs(dispersion_function(xi, t, n, "corrected"))
        residual_printed = np.abs(dispersion_function(xi, t, n, "printed"))
        cn_err = cn_dispersion_error(t, n)[0::2]

    odd_exact = None
    mismatch = None
    unit = 1j if schro else 1.0
    if gate and n <= gate_cap:
        p = EvolutionProblem(Stencil.laplacian(), dirichlet(), Domain(n), unit)
        dense = dense_spectrum(p, SchemeKind.S2, t)
        predicted = np.concatenate([np.exp(unit * t * xi), np.exp(unit * t * odd_nu)])
        if not schro:
            dense = dense.real.astype(complex)
            predicted = predicted.real.astype(complex)
        mismatch = match_multisets(predicted, dense)
        odd_lam = np.exp(unit * t * odd_nu)
        odd_exact = np.min(np.abs(odd_lam[:, None] - dense[None, :]), axis=1) <= 1e-10
        if mismatch > tol:
            raise OracleMismatchError(
                f"secular roots miss the dense S2 spectrum by {mismatch:.3e} (tol {tol:g})"
            )

    return SpectrumReport(
        t=float(t),
        n=n,
        equation=equation,
        xi=xi,
        mu_even=mu_even,
        oe_error=np.abs(xi - mu_even),
        cn_error=cn_err,
        odd_nu=odd_nu,
        odd_exact=odd_exact,
        dense_mismatch=mismatch,
        residual_corrected=residual_corrected,
        residual_printed=residual_printed,
    )
