"""Optional numba acceleration.

Set ``LEVYOU_DISABLE_NUMBA=1`` to force the pure-numpy code paths, e.g. to
compare backends or to run where numba is unavailable.
"""
import os

_flag = os.environ.get("LEVYOU_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _flag in {"1", "true", "yes", "on"}

try:
    if NUMBA_DISABLED:
        raise ImportError("numba disabled by LEVYOU_DISABLE_NUMBA")
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


def backend():
    return "numba" if HAVE_NUMBA else "numpy"


def thread_count():
    """Worker threads for embarrassingly parallel loops (``LEVYOU_THREADS``)."""
    raw = os.environ.get("LEVYOU_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)
