"""The boundary correction ``G = A_K - A_L`` between two extensions.

Two extensions of the same stencil only disagree at points whose stencil
leaves the domain, so ``G`` vanishes except on a small block indexed by
the boundary points.  That block is stored dense and exponentiated
directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryBlockError, ExtensionError
from .lattice import Domain, Extension, Stencil, classify_boundary, operator_entries

__all__ = [
    "BoundaryOperator",
    "BoundaryExponential",
    "build_gkl",
    "small_expm",
    "exp_boundary",
    "apply_boundary_exp",
    "embed",
    "DEFAULT_BLOCK_CAP",
]

DEFAULT_BLOCK_CAP = 16

# Taylor order for ||A|| <= 1/2 after scaling; the truncation term is
# below 0.5**19 / 19! ~ 2e-23.
_TAYLOR_ORDER = 18


@dataclass(frozen=True, eq=False)
class BoundaryOperator:
    """Restriction of ``G`` to the boundary points ``indices`` (ascending)."""

    indices: tuple
    matrix: np.ndarray

    @property
    def size(self) -> int:
        return len(self.indices)


@dataclass(frozen=True, eq=False)
class BoundaryExponential:
    """``exp(theta * G)`` on the boundary block; identity elsewhere."""

    indices: tuple
    matrix: np.ndarray
    theta: complex


def _row_block(rows, cols, vals, pick, n):
    """Accumulate the rows listed in ``pick`` into a (len(pick), n) array."""
    where = {r: k for k, r in enumerate(pick)}
    sel = np.isin(rows, pick)
    out = np.zeros((len(pick), n), dtype=complex)
    local = np.array([where[r] for r in rows[sel]], dtype=int)
    np.add.at(out, (local, cols[sel]), vals[sel])
    return out


def build_gkl(stencil: Stencil, ext_k: Extension, ext_l: Extension, domain: Domain) -> BoundaryOperator:
    """Compact form of ``A_K - A_L``.

    Raises
    ------
    ExtensionError
        If the difference touches a column outside the boundary set, i.e.
        one of the extensions reads values from inner points.
    """
    sets = classify_boundary(stencil, domain)
    idx = sets.boundary
    n = domain.n
    if not idx:
        return BoundaryOperator((), np.zeros((0, 0), dtype=complex))

    k_rows = _row_block(*operator_entries(stencil, ext_k, domain), list(idx), n)
    l_rows = _row_block(*operator_entries(stencil, ext_l, domain), list(idx), n)
    diff = k_rows - l_rows

    outside = np.ones(n, dtype=bool)
    outside[list(idx)] = False
    if np.any(diff[:, outside] != 0):
        bad = sorted(set(np.nonzero(diff[:, outside])[1].tolist()))
        inner_cols = np.arange(n)[outside][bad]
        raise ExtensionError(
            "extension pair violates boundary-support condition "
            f"(difference depends on inner points {inner_cols.tolist()})"
        )
    block = np.ascontiguousarray(diff[:, list(idx)])
    block.setflags(write=False)
    return BoundaryOperator(tuple(idx), block)


def small_expm(a: np.ndarray) -> np.ndarray:
    """Matrix exponential of a small dense matrix by scaling and squaring."""
    a = np.asarray(a, dtype=complex)
    m = a.shape[0]
    if m == 0:
        return a.copy()
    norm = np.linalg.norm(a, 1)
    s = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    x = a / (2.0**s)
    term = np.eye(m, dtype=complex)
    out = term.copy()
    for k in range(1, _TAYLOR_ORDER + 1):
        term = term @ x / k
        out += term
    for _ in range(s):
        out = out @ out
    return out


def exp_boundary(theta, g: BoundaryOperator, cap: int = DEFAULT_BLOCK_CAP) -> BoundaryExponential:
    if g.size > cap:
        raise BoundaryBlockError(f"boundary block too large ({g.size} > cap {cap})")
    theta = complex(theta)
    mat = small_expm(theta * g.matrix)
    mat.setflags(write=False)
    return BoundaryExponential(g.indices, mat, theta)


def apply_boundary_exp(e: BoundaryExponential, f) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    out = f.copy()
    if e.indices:
        idx = list(e.indices)
        out[idx] = e.matrix @ f[idx]
    return out


def embed(block: np.ndarray, indices, n: int, fill_identity: bool = False) -> np.ndarray:
    """Place ``block`` at ``indices x indices`` of an ``n x n`` matrix.

    With ``fill_identity`` the remaining diagonal is set to one, which is
    how a boundary exponential acts on the whole space.
    """
    out = np.eye(n, dtype=complex) if fill_identity else np.zeros((n, n), dtype=complex)
    idx = list(indices)
    if idx:
        out[np.ix_(idx, idx)] = block
    return out
