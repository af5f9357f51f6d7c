"""Hot inner loops, compiled when available.

The Cython extension ``bpexp._ckernels`` is used if it imports; otherwise
the pure-Python ``bpexp._pykernels`` is.  Setting ``BPEXP_PURE_PYTHON=1``
forces the fallback.  ``BACKEND`` names the active one.
"""
import os

from . import _pykernels

if os.environ.get("BPEXP_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # no compiler at install time
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

tridiag_solve = _impl.tridiag_solve
secular_eval = _impl.secular_eval
bisect_roots = _impl.bisect_roots

# secular-equation forms understood by the kernels
FORM_EXP = 0
FORM_TAN = 1


def available_backends():
    """Map backend name -> kernel module, for tests and benchmarks."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
