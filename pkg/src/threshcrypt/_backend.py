"""Backend selection for the hot loops.

Set ``THRESHCRYPT_DISABLE_JIT=1`` before import to force the pure
Python/numpy path. Numba is also skipped automatically when it is not
installed.
"""

import os

_TRUTHY = {"1", "true", "yes", "on"}

JIT_REQUESTED = os.environ.get("THRESHCRYPT_DISABLE_JIT", "").strip().lower() not in _TRUTHY

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = JIT_REQUESTED and numba is not None
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(func):
    """Compile ``func`` with numba when available, else return it unchanged."""
    if numba is None:
        return func
    # fastmath stays off: keystreams must match the fallback bit for bit
    return numba.njit(cache=True, fastmath=False)(func)
