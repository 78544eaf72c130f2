"""Kernel backend selection.

Hot numeric loops live in :mod:`noisyqr._kernels` in two forms: a plain
Python/loop form that numba compiles, and a vectorized numpy fallback.
The active form is chosen once at import time from the environment:

    NOISYQR_BACKEND=auto    use numba when importable, else numpy (default)
    NOISYQR_BACKEND=numba   require numba, fail if it cannot be imported
    NOISYQR_BACKEND=numpy   force the pure-numpy fallback

Results are deterministic per backend; `benchmarks/bench_backends.py`
compares speed and agreement of the two.
"""

from __future__ import annotations

import os

_VALID = ("auto", "numba", "numpy")
_choice = os.environ.get("NOISYQR_BACKEND", "auto").strip().lower()
if _choice not in _VALID:
    raise ValueError(
        f"NOISYQR_BACKEND must be one of {_VALID}, got {_choice!r}"
    )

NUMBA_AVAILABLE = False
_njit = None
if _choice in ("auto", "numba"):
    try:
        from numba import njit as _njit  # noqa: F401

        NUMBA_AVAILABLE = True
    except ImportError:
        if _choice == "numba":
            raise

USE_NUMBA = NUMBA_AVAILABLE and _choice in ("auto", "numba")

BACKEND = "numba" if USE_NUMBA else "numpy"


def jit(fn):
    """Compile ``fn`` with numba when available, else return it unchanged.

    Compiled kernels are cached on disk and release the GIL so trial blocks
    can run on a thread pool.
    """
    if NUMBA_AVAILABLE:
        return _njit(cache=True, nogil=True)(fn)
    return fn
