"""Optional numba acceleration.

Set ``LEO_NTN_DISABLE_NUMBA=1`` before import to force the pure numpy/Python
kernels. Both paths must produce identical numbers; the test-suite checks it.
"""

import os

_DISABLED = os.environ.get("LEO_NTN_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    from numba import njit as _njit
    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _njit = None
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE and not _DISABLED


def maybe_njit(fallback=None, **options):
    """Compile the decorated function with numba when enabled.

    When numba is off, ``fallback`` is returned instead (or the undecorated
    function if no fallback is given).
    """
    def decorator(func):
        if USE_NUMBA:
            return _njit(cache=True, **options)(func)
        return fallback if fallback is not None else func
    return decorator
