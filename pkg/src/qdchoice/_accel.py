"""Backend switch for the hot kernels.

Kernels are written once as plain Python loops and compiled with numba when
available. Setting ``QDCHOICE_BACKEND=numpy`` in the environment (before
import) disables compilation and routes callers to the vectorised numpy
implementations instead.
"""
import os

BACKEND = os.environ.get("QDCHOICE_BACKEND", "numba").strip().lower()
if BACKEND not in ("numba", "numpy"):
    raise ImportError(f"QDCHOICE_BACKEND must be 'numba' or 'numpy', got {BACKEND!r}")

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None
    BACKEND = "numpy"

HAVE_NUMBA = _numba is not None
USE_NUMBA = BACKEND == "numba"


def njit(func):
    """``numba.njit(cache=False)`` when numba is importable, else identity."""
    if _numba is None:
        return func
    return _numba.njit(cache=False)(func)
