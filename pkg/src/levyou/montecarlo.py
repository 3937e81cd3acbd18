"""Monte Carlo simulation of the Levy OU process.

The SDE ``dx = -x dt + dL`` is integrated with the Euler scheme
``x' = (1 - dt) x + dt^(1/mu) xi`` where ``xi`` is standard symmetric stable
(CF ``exp(-|k|^mu)``).  Random numbers come from counter-based Philox
streams keyed by ``(seed, stream_id)``; ensembles are cut into blocks of
fixed size with one stream per block, so results do not depend on how many
workers process the blocks.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Union

import numpy as np
from scipy import fft as sfft

from . import _kernels
from ._accel import thread_count
from .errors import DomainError, InsufficientRunLength
from .evolve import StablePDFParams
from .numerics import RelaxationSeries
from .observables import ObservableSpectrum, stationary_mean

log = logging.getLogger(__name__)

BLOCK_SIZE = 4096
CHUNK_STEPS = 1 << 16
MAX_DT = 0.1


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for v in (self.seed, self.stream_id):
            if not 0 <= int(v) < 2 ** 64:
                raise DomainError("seed and stream_id must be 64-bit unsigned integers")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.Philox(ss))


Initial = Union[StablePDFParams, float]


@dataclass(frozen=True)
class SimConfig:
    """Simulation parameters.

    ``initial`` is a :class:`StablePDFParams` or a float (point mass).
    ``record_every`` is the number of steps between recorded states.
    """

    mu: float
    dt: float
    steps: int
    ensemble_size: int = 1
    seed: int = 0
    initial: Initial = 0.0
    record_every: int = 1

    def __post_init__(self):
        if not 0 < self.mu <= 2:
            raise DomainError(f"mu must lie in (0, 2], got {self.mu!r}")
        if not 0 < self.dt <= MAX_DT:
            raise DomainError(f"time step must lie in (0, {MAX_DT}], got {self.dt!r}")
        if int(self.steps) < 1 or int(self.ensemble_size) < 1 or int(self.record_every) < 1:
            raise DomainError("steps, ensemble_size and record_every must be positive")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")

    @property
    def total_time(self) -> float:
        return self.dt * self.steps

    @property
    def noise_scale(self) -> float:
        return self.dt ** (1.0 / self.mu)

    def record_times(self) -> np.ndarray:
        n = self.steps // self.record_every
        return np.arange(n + 1) * self.record_every * self.dt


# ---------------------------------------------------------------------------
# stable variates

def _cms(alpha: float, v, w):
    # symmetric Chambers-Mallows-Stuck map of V ~ U(-pi/2, pi/2), W ~ Exp(1)
    if alpha == 2.0:
        return 2.0 * np.sin(v) * np.sqrt(w)    # Box-Muller form of sqrt(2) N(0, 1)
    if alpha == 1.0:
        return np.tan(v)
    return (np.sin(alpha * v) / np.cos(v) ** (1.0 / alpha)
            * (np.cos((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha))


def stable_variates(alpha: float, gen: np.random.Generator, size) -> np.ndarray:
    """Draws with CF ``exp(-|k|^alpha)`` from an existing generator."""
    if not 0 < alpha <= 2:
        raise DomainError(f"alpha must lie in (0, 2], got {alpha!r}")
    v = gen.uniform(-math.pi / 2, math.pi / 2, size)
    w = gen.standard_exponential(size)
    return _cms(float(alpha), v, w)


def sample_stable(alpha: float, rng: RngStream, size=None):
    """Standard symmetric stable draw(s) from a fresh generator of ``rng``."""
    out = stable_variates(alpha, rng.generator(), 1 if size is None else size)
    return float(out[0]) if size is None else out


def _initial_states(initial: Initial, gen: np.random.Generator, n: int) -> np.ndarray:
    if isinstance(initial, StablePDFParams):
        return initial.shift + initial.scale * stable_variates(initial.alpha, gen, n)
    return np.full(n, float(initial))


def step_oup(x: float, cfg: SimConfig, rng: Optional[RngStream] = None, xi: Optional[float] = None):
    """One Euler step.  Pass ``xi`` to fix the noise variate (``xi=0`` is pure decay)."""
    if xi is None:
        if rng is None:
            raise DomainError("step_oup needs an rng stream or an explicit xi")
        xi = sample_stable(cfg.mu, rng)
    return (1.0 - cfg.dt) * x + cfg.noise_scale * xi


# ---------------------------------------------------------------------------
# ensembles

def simulate_ensemble(cfg: SimConfig, n: int, stream_id: int, use_numba=None) -> np.ndarray:
    """States of ``n`` independent paths at the record times (shape ``(n, R)``)."""
    gen = RngStream(cfg.seed, stream_id).generator()
    x0 = _initial_states(cfg.initial, gen, n)
    noise = cfg.noise_scale * stable_variates(cfg.mu, gen, (n, cfg.steps))
    return _kernels.ensemble(x0, noise, 1.0 - cfg.dt, cfg.record_every, use_numba)


@dataclass
class _Moments:
    n: int
    sums: Dict[str, np.ndarray] = field(default_factory=dict)
    squares: Dict[str, np.ndarray] = field(default_factory=dict)


def _block_moments(cfg: SimConfig, observables, block: int, n: int) -> _Moments:
    states = simulate_ensemble(cfg, n, block)
    m = _Moments(n)
    for u in observables:
        vals = u(states)
        m.sums[u.name] = vals.sum(axis=0)
        m.squares[u.name] = (vals * vals).sum(axis=0)
    return m


def ensemble_delta(cfg: SimConfig, observables: Sequence[ObservableSpectrum],
                   reference: Optional[Dict[str, float]] = None) -> Dict[str, RelaxationSeries]:
    """Distance of ensemble means from their stationary values, with standard errors.

    The stationary means come from the stationary CF by quadrature unless
    given in ``reference``.  Blocks are reduced in block order.
    """
    if cfg.ensemble_size < 10 ** 4:
        raise DomainError(f"ensemble_size must be at least 10^4, got {cfg.ensemble_size}")
    reference = dict(reference or {})
    for u in observables:
        if u.name not in reference:
            reference[u.name] = stationary_mean(u, cfg.mu)
    sizes = [BLOCK_SIZE] * (cfg.ensemble_size // BLOCK_SIZE)
    if cfg.ensemble_size % BLOCK_SIZE:
        sizes.append(cfg.ensemble_size % BLOCK_SIZE)
    log.info("ensemble: %d paths in %d blocks, %d steps", cfg.ensemble_size, len(sizes), cfg.steps)
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        parts = list(pool.map(lambda b: _block_moments(cfg, observables, b, sizes[b]),
                              range(len(sizes))))
    taus = cfg.record_times()
    out = {}
    n = float(cfg.ensemble_size)
    for u in observables:
        s = np.zeros(taus.size)
        s2 = np.zeros(taus.size)
        for p in parts:
            s += p.sums[u.name]
            s2 += p.squares[u.name]
        mean = s / n
        var = np.maximum(s2 / n - mean * mean, 0.0) * n / (n - 1)
        out[u.name] = RelaxationSeries(
            taus, np.abs(mean - reference[u.name]), np.sqrt(var / n),
            {"observable": u.name, "mu": cfg.mu, "quantity": "delta", "method": "mc",
             "N": cfg.ensemble_size, "dt": cfg.dt, "seed": cfg.seed,
             "stationary_mean": reference[u.name]})
    return out


# ---------------------------------------------------------------------------
# single trajectory

def simulate_trajectory(cfg: SimConfig, burn_in: float = 0.0, stream_id: int = 0,
                        use_numba=None) -> np.ndarray:
    """States at every ``record_every``-th step after discarding ``burn_in`` time."""
    gen = RngStream(cfg.seed, stream_id).generator()
    x = float(_initial_states(cfg.initial, gen, 1)[0])
    skip = int(round(burn_in / cfg.dt))
    total = skip + cfg.steps
    keep = []
    done = 0
    a = 1.0 - cfg.dt
    while done < total:
        m = min(CHUNK_STEPS, total - done)
        noise = cfg.noise_scale * stable_variates(cfg.mu, gen, m)
        path = _kernels.trajectory(x, noise, a, use_numba)
        x = float(path[-1])
        idx = np.arange(done + 1, done + m + 1)
        sel = (idx > skip) & ((idx - skip) % cfg.record_every == 0)
        keep.append(path[sel])
        done += m
    return np.concatenate(keep)


def _acov_fft(y: np.ndarray, max_lag: int) -> np.ndarray:
    # sum_t y[t] y[t + l] for l = 0..max_lag by zero-padded FFT
    n = y.size
    size = sfft.next_fast_len(n + max_lag + 1)
    f = sfft.rfft(y, size, workers=thread_count())
    return sfft.irfft(f * np.conj(f), size, workers=thread_count())[: max_lag + 1]


def autocovariance(y, max_lag: int) -> np.ndarray:
    """``(1/(n-l)) sum (y_t - m)(y_{t+l} - m)`` with ``m`` the sample mean."""
    y = np.asarray(y, dtype=float)
    yc = y - y.mean()
    c = _acov_fft(yc, max_lag) / (y.size - np.arange(max_lag + 1))
    c[0] = np.mean(yc * yc)
    return c


def trajectory_autocorr(cfg: SimConfig, observables: Sequence[ObservableSpectrum],
                        max_lag: float, burn_in: float = 20.0,
                        batches: int = 20) -> Dict[str, RelaxationSeries]:
    """Autocovariance of ``u(x(t))`` along one stationary-regime trajectory.

    Standard errors are the spread of the same estimator over ``batches``
    consecutive segments divided by ``sqrt(batches)``.  Neighbouring lags are
    strongly correlated, so the bars are conservative pointwise and say
    nothing about the joint error of a fitted rate.
    """
    if cfg.total_time < 100 * max_lag:
        raise InsufficientRunLength(
            f"run length {cfg.total_time:g} is below 100 x max_lag = {100 * max_lag:g}",
            required=100 * max_lag)
    h = cfg.dt * cfg.record_every
    lags = int(math.floor(max_lag / h + 1e-9))
    xs = simulate_trajectory(cfg, burn_in)
    log.info("trajectory: %d recorded states, %d lags", xs.size, lags)
    seg = xs.size // batches
    if seg < 10 * (lags + 1):
        raise InsufficientRunLength("batches too short for the requested lag range",
                                    required=100 * max_lag)
    taus = np.arange(lags + 1) * h
    out = {}
    for u in observables:
        y = np.asarray(u(xs), dtype=float)
        c = autocovariance(y, lags)
        m = y.mean()
        per = np.empty((batches, lags + 1))
        for b in range(batches):
            yb = y[b * seg:(b + 1) * seg] - m
            per[b] = _acov_fft(yb, lags) / (seg - np.arange(lags + 1))
        se = per.std(axis=0, ddof=1) / math.sqrt(batches)
        out[u.name] = RelaxationSeries(
            taus, c, se, {"observable": u.name, "mu": cfg.mu, "quantity": "corr",
                          "method": "mc", "T": cfg.total_time, "dt": cfg.dt, "seed": cfg.seed})
    return out
