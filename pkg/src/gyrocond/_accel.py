"""JIT compilation shim.

All hot kernels are written in a numba-compatible subset of numpy. By
default they are compiled with ``numba.njit``; setting the environment
variable ``GYROCOND_NO_NUMBA=1`` (or running without numba installed)
selects the pure-Python/numpy fallback path instead. Both paths execute
the same source, so results are bit-identical between backends.
"""

import os

_DISABLED = os.environ.get("GYROCOND_NO_NUMBA", "").strip() in ("1", "true", "yes")

if not _DISABLED:
    try:
        from numba import njit as _numba_njit

        USING_NUMBA = True

        def njit(func):
            # cache=True keeps compiled kernels across processes
            return _numba_njit(cache=True)(func)

    except ImportError:  # pragma: no cover - numba is a declared dependency
        USING_NUMBA = False
else:
    USING_NUMBA = False

if not USING_NUMBA:

    def njit(func):
        return func


def backend_name() -> str:
    return "numba" if USING_NUMBA else "python"
