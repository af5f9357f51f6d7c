"""Lattice domains, constant-coefficient stencils and extension operators.

A grid function on ``Domain(n)`` is a complex vector of length ``n``
indexed by the lattice points ``0 .. n-1``.  Functions here accept
``(n,)`` vectors and ``(n, k)`` stacks of column vectors.

Boundary conditions are expressed as *extensions*: linear maps that
supply values at the ghost points a stencil reaches outside the domain.
Applying a stencil to an extended grid function gives the operator with
those boundary conditions built in.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Union

import numpy as np

from .errors import ExtensionError, StencilError

__all__ = [
    "Domain",
    "Stencil",
    "Periodic",
    "ThirdKind",
    "Custom",
    "Extension",
    "BoundarySets",
    "dirichlet",
    "neumann",
    "as_grid",
    "classify_boundary",
    "ghost_map",
    "apply_extended",
    "operator_entries",
    "dense_matrix",
    "tridiagonal_bands",
]


@dataclass(frozen=True)
class Domain:
    """The lattice ``{0, 1, ..., n-1}``."""

    n: int

    def __post_init__(self):
        n = int(self.n)
        if n < 2:
            raise ValueError(f"domain needs at least 2 points, got n={self.n}")
        object.__setattr__(self, "n", n)

    @property
    def half(self) -> int:
        """``n // 2``; only meaningful when ``n`` is even."""
        return self.n // 2

    def require_even(self):
        if self.n % 2:
            raise ValueError(f"n must be even here, got n={self.n}")


@dataclass(frozen=True)
class Stencil:
    """Translation-invariant difference operator.

    ``taps`` is a sequence of ``(offset, coefficient)`` pairs; the operator
    acts as ``(A f)(x) = sum(c * f(x + offset))``.
    """

    taps: tuple

    def __post_init__(self):
        taps = tuple(sorted(((int(o), complex(c)) for o, c in self.taps), key=lambda tap: tap[0]))
        if not taps:
            raise StencilError("stencil needs at least one tap")
        offsets = [o for o, _ in taps]
        if len(set(offsets)) != len(offsets):
            raise StencilError(f"duplicate offsets in stencil: {offsets}")
        object.__setattr__(self, "taps", taps)

    @classmethod
    def laplacian(cls) -> "Stencil":
        """Second difference ``f(x-1) - 2 f(x) + f(x+1)``."""
        return cls(((-1, 1.0), (0, -2.0), (1, 1.0)))

    @classmethod
    def identity(cls) -> "Stencil":
        return cls(((0, 1.0),))

    @property
    def offsets(self) -> tuple:
        return tuple(o for o, _ in self.taps)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for _, c in self.taps], dtype=complex)

    @property
    def reach(self) -> int:
        """Largest distance the stencil looks away from its centre."""
        return max(abs(o) for o in self.offsets)

    def scaled(self, factor) -> "Stencil":
        factor = complex(factor)
        return Stencil(tuple((o, factor * c) for o, c in self.taps))


@dataclass(frozen=True)
class Periodic:
    """Wrap-around extension, ``f(y) = f(y mod n)``."""


@dataclass(frozen=True)
class ThirdKind:
    """Boundary conditions of the third kind.

    For the Laplacian the ghost values are ``f(-1) = alpha f(0)`` and
    ``f(n) = beta f(n-1)``.  Wider stencils mirror about the half-integer
    points: ``f(-k) = alpha f(k-1)`` and ``f(n-1+k) = beta f(n-k)``.
    """

    alpha: complex = -1.0
    beta: complex = -1.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))


@dataclass(frozen=True)
class Custom:
    """Explicit ghost-value map.

    ``mapping`` sends each ghost index to a list of ``(index, weight)``
    pairs; a plain dict is accepted and frozen into nested tuples.
    """

    mapping: tuple = field(default=())

    def __post_init__(self):
        items = self.mapping.items() if isinstance(self.mapping, Mapping) else self.mapping
        frozen = tuple(
            sorted(
                (int(g), tuple((int(i), complex(w)) for i, w in terms))
                for g, terms in items
            )
        )
        object.__setattr__(self, "mapping", frozen)

    def as_dict(self) -> dict:
        return {g: list(terms) for g, terms in self.mapping}


Extension = Union[Periodic, ThirdKind, Custom]


def dirichlet() -> ThirdKind:
    return ThirdKind(-1.0, -1.0)


def neumann() -> ThirdKind:
    return ThirdKind(1.0, 1.0)


@dataclass(frozen=True)
class BoundarySets:
    """Partition of the domain relative to a stencil.

    ``boundary`` holds the points whose stencil leaves the domain,
    ``ghost`` the outside points they reach.
    """

    inner: tuple
    boundary: tuple
    ghost: tuple


def as_grid(f, domain: Domain) -> np.ndarray:
    """Validate ``f`` as a grid function (or stack of them) on ``domain``."""
    arr = np.asarray(f, dtype=complex)
    if arr.ndim not in (1, 2) or arr.shape[0] != domain.n:
        raise ValueError(f"grid function of shape {arr.shape} does not fit n={domain.n}")
    return arr


def _check_width(stencil: Stencil, domain: Domain):
    if stencil.reach >= domain.n:
        raise StencilError(
            f"stencil wider than domain (reach {stencil.reach}, n={domain.n})"
        )


@lru_cache(maxsize=256)
def classify_boundary(stencil: Stencil, domain: Domain) -> BoundarySets:
    _check_width(stencil, domain)
    n = domain.n
    lo, hi = min(stencil.offsets), max(stencil.offsets)
    boundary = tuple(x for x in range(n) if x + lo < 0 or x + hi >= n)
    inner = tuple(x for x in range(n) if 0 <= x + lo and x + hi < n)
    ghost = sorted(
        {x + o for x in boundary for o in stencil.offsets if not 0 <= x + o < n}
    )
    return BoundarySets(inner=inner, boundary=boundary, ghost=tuple(ghost))


@lru_cache(maxsize=256)
def _ghost_map(ext: Extension, ghosts: tuple, n: int) -> dict:
    if isinstance(ext, Periodic):
        return {g: ((g % n, 1.0 + 0j),) for g in ghosts}
    if isinstance(ext, ThirdKind):
        out = {}
        for g in ghosts:
            if g < 0:
                out[g] = ((-g - 1, ext.alpha),)
            else:
                out[g] = ((2 * n - 1 - g, ext.beta),)
        return out
    if isinstance(ext, Custom):
        table = dict(ext.mapping)
        missing = [g for g in ghosts if g not in table]
        if missing:
            raise ExtensionError(f"extension incomplete: no value for ghost points {missing}")
        for g in ghosts:
            bad = [i for i, _ in table[g] if not 0 <= i < n]
            if bad:
                raise ExtensionError(f"ghost {g} refers to indices {bad} outside the domain")
        return {g: table[g] for g in ghosts}
    raise TypeError(f"unknown extension type {type(ext).__name__}")


def ghost_map(ext: Extension, stencil: Stencil, domain: Domain) -> dict:
    """Ghost index -> tuple of ``(domain index, weight)`` for this stencil."""
    sets = classify_boundary(stencil, domain)
    return _ghost_map(ext, sets.ghost, domain.n)


def apply_extended(stencil: Stencil, ext: Extension, f, domain: Domain | None = None) -> np.ndarray:
    """Apply ``stencil`` to ``f`` extended by ``ext``.

    Parameters
    ----------
    stencil : Stencil
    ext : Periodic, ThirdKind or Custom
    f : array_like, shape (n,) or (n, k)
    domain : Domain, optional
        Defaults to ``Domain(len(f))``.
    """
    if domain is None:
        domain = Domain(np.shape(f)[0])
    f = as_grid(f, domain)
    n, r = domain.n, stencil.reach
    gmap = ghost_map(ext, stencil, domain)

    padded = np.zeros((n + 2 * r,) + f.shape[1:], dtype=complex)
    padded[r : r + n] = f
    for g, terms in gmap.items():
        padded[r + g] = sum(w * f[i] for i, w in terms)

    out = np.zeros_like(f)
    for off, c in stencil.taps:
        out += c * padded[r + off : r + off + n]
    return out


@lru_cache(maxsize=128)
def operator_entries(stencil: Stencil, ext: Extension, domain: Domain):
    """Sparse triplets ``(rows, cols, vals)`` of the extended operator.

    Duplicate ``(row, col)`` pairs are possible and must be summed.
    """
    n = domain.n
    gmap = ghost_map(ext, stencil, domain)
    x = np.arange(n)
    rows, cols, vals = [], [], []
    for off, c in stencil.taps:
        y = x + off
        inside = (y >= 0) & (y < n)
        rows.append(x[inside])
        cols.append(y[inside])
        vals.append(np.full(int(inside.sum()), c, dtype=complex))
        for xb in x[~inside]:
            for i, w in gmap[int(xb) + off]:
                rows.append(np.array([xb]))
                cols.append(np.array([i]))
                vals.append(np.array([c * w], dtype=complex))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    for a in (rows, cols, vals):
        a.setflags(write=False)
    return rows, cols, vals


def dense_matrix(stencil: Stencil, ext: Extension, domain: Domain) -> np.ndarray:
    """Dense ``n x n`` matrix of the extended operator."""
    rows, cols, vals = operator_entries(stencil, ext, domain)
    a = np.zeros((domain.n, domain.n), dtype=complex)
    np.add.at(a, (rows, cols), vals)
    return a


@lru_cache(maxsize=128)
def tridiagonal_bands(stencil: Stencil, ext: Extension, domain: Domain):
    """Return ``(lower, diag, upper)`` if the operator is tridiagonal, else None.

    ``lower[i]`` is entry ``(i+1, i)`` and ``upper[i]`` is ``(i, i+1)``.
    """
    rows, cols, vals = operator_entries(stencil, ext, domain)
    d = cols - rows
    if np.any(np.abs(d) > 1):
        return None
    n = domain.n
    lower = np.zeros(n - 1, dtype=complex)
    diag = np.zeros(n, dtype=complex)
    upper = np.zeros(n - 1, dtype=complex)
    np.add.at(diag, rows[d == 0], vals[d == 0])
    np.add.at(upper, rows[d == 1], vals[d == 1])
    np.add.at(lower, cols[d == -1], vals[d == -1])
    for a in (lower, diag, upper):
        a.setflags(write=False)
    return lower, diag, upper
