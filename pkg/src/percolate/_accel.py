"""Backend switch for the lattice kernels.

``PERC_BACKEND=numpy`` runs every kernel as plain Python over numpy arrays;
the default compiles them with numba when it is importable.
"""
from __future__ import annotations

import os

_requested = os.environ.get("PERC_BACKEND", "numba").strip().lower()

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

USE_NUMBA = _numba is not None and _requested != "numpy"
BACKEND = "numba" if USE_NUMBA else "numpy"


def jit(fn):
    """Compile ``fn`` in nopython mode, or hand it back untouched."""
    if USE_NUMBA:
        return _numba.njit(cache=True, nogil=True)(fn)
    return fn

