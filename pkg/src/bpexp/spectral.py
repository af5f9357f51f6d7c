"""Periodic exponentials through the discrete Fourier transform.

The transform pair follows the unnormalised forward convention

    (F f)(x) = sum_y exp(-2 pi i x y / n) f(y),

with the ``1/n`` factor carried by the inverse.  A stencil extended
periodically is circulant, so it is diagonal in this basis and its
exponential costs two FFTs.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .lattice import Domain, Stencil, as_grid

__all__ = ["PeriodicSymbol", "dft_forward", "dft_inverse", "periodic_symbol", "exp_periodic"]


def dft_forward(f) -> np.ndarray:
    """Unnormalised DFT along the first axis."""
    return np.fft.fft(np.asarray(f, dtype=complex), axis=0)


def dft_inverse(f) -> np.ndarray:
    return np.fft.ifft(np.asarray(f, dtype=complex), axis=0)


@dataclass(frozen=True, eq=False)
class PeriodicSymbol:
    """Eigenvalues ``nu[x]`` of a periodic stencil on the Fourier modes."""

    nu: np.ndarray

    @property
    def n(self) -> int:
        return self.nu.shape[0]


@lru_cache(maxsize=64)
def periodic_symbol(stencil: Stencil, domain: Domain) -> PeriodicSymbol:
    n = domain.n
    theta = 2.0 * np.pi * np.arange(n) / n
    taps = dict(stencil.taps)
    nu = np.zeros(n, dtype=complex)
    if all(taps.get(-o) == c for o, c in taps.items()):
        # symmetric stencil: pair the taps so real coefficients give a real symbol
        for o, c in taps.items():
            if o == 0:
                nu += c
            elif o > 0:
                nu += 2.0 * c * np.cos(o * theta)
    else:
        for o, c in taps.items():
            nu += c * np.exp(1j * o * theta)
    nu.setflags(write=False)
    return PeriodicSymbol(nu)


def exp_periodic(t: float, symbol: PeriodicSymbol, f) -> np.ndarray:
    """``exp(t A_L) f`` for the periodic operator with eigenvalues ``symbol.nu``."""
    f = as_grid(f, Domain(symbol.n))
    if t == 0:
        return f.copy()
    factor = np.exp(t * symbol.nu)
    if f.ndim == 2:
        factor = factor[:, None]
    return dft_inverse(factor * dft_forward(f))
