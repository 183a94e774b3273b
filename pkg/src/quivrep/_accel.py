"""Backend selection for the numeric kernels.

Set ``QUIVREP_PURE_NUMPY=1`` to bypass numba and run the numpy fallbacks.
"""

import os

PURE_NUMPY = os.environ.get("QUIVREP_PURE_NUMPY", "").strip() not in ("", "0")

try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _njit = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not PURE_NUMPY


def njit(fn):
    """Compile ``fn`` with numba when available, else return it unchanged."""
    if _njit is None:
        return fn
    return _njit(cache=True)(fn)


def backend():
    return "numba" if USE_NUMBA else "numpy"
