"""Inner loops of the OU simulations.

Both backends perform the same floating point operations in the same order
(``x <- a * x + noise``), so their outputs agree bit for bit.  Noise arrays
are produced by the caller; only the recurrence lives here.
"""
import numpy as np
from scipy.signal import lfilter

from ._accel import HAVE_NUMBA, njit


@njit(cache=True)
def _ensemble_numba(x0, noise, a, stride):
    n, steps = noise.shape
    out = np.empty((n, steps // stride + 1))
    for i in range(n):
        x = x0[i]
        out[i, 0] = x
        r = 1
        for s in range(steps):
            x = a * x + noise[i, s]
            if (s + 1) % stride == 0:
                out[i, r] = x
                r += 1
    return out


def _ensemble_numpy(x0, noise, a, stride):
    n, steps = noise.shape
    out = np.empty((n, steps // stride + 1))
    x = np.array(x0, dtype=float)
    out[:, 0] = x
    r = 1
    for s in range(steps):
        x = a * x + noise[:, s]
        if (s + 1) % stride == 0:
            out[:, r] = x
            r += 1
    return out


@njit(cache=True)
def _trajectory_numba(x0, noise, a):
    out = np.empty(noise.size)
    x = x0
    for s in range(noise.size):
        x = a * x + noise[s]
        out[s] = x
    return out


def _trajectory_numpy(x0, noise, a):
    # first-order IIR filter: y[n] = noise[n] + a y[n-1]
    y, _ = lfilter([1.0], [1.0, -a], noise, zi=[a * x0])
    return y


def ensemble(x0, noise, a, stride=1, use_numba=None):
    """Run ``x <- a x + noise[:, s]`` for every row; record every ``stride`` steps."""
    use_numba = HAVE_NUMBA if use_numba is None else use_numba
    x0 = np.ascontiguousarray(x0, dtype=float)
    noise = np.ascontiguousarray(noise, dtype=float)
    fn = _ensemble_numba if use_numba else _ensemble_numpy
    return fn(x0, noise, float(a), int(stride))


def trajectory(x0, noise, a, use_numba=None):
    """States after each of the ``len(noise)`` steps, starting from ``x0``."""
    use_numba = HAVE_NUMBA if use_numba is None else use_numba
    noise = np.ascontiguousarray(noise, dtype=float)
    fn = _trajectory_numba if use_numba else _trajectory_numpy
    return fn(float(x0), noise, float(a))
