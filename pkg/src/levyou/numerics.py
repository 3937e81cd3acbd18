"""Shared numerical primitives.

Adaptive quadrature on finite, semi-infinite and symmetric domains (QUADPACK
through :func:`scipy.integrate.quad`), principal-value integration on mirrored
panels, log-linear rate fitting and interpolation on wave-number grids.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import quad, trapezoid
from scipy.optimize import brentq
from scipy.interpolate import CubicSpline

from .errors import DomainError, GridHullError, QuadratureError

Domain = Union[str, Tuple[float, float]]

CLOSED_FORM_TOL = 1e-10
GRID_TOL = 1e-6


# ---------------------------------------------------------------------------
# containers

@dataclass(frozen=True, eq=False)
class Grid:
    """Ordered sample points on a dimensionless k or x axis."""

    points: np.ndarray
    spacing_policy: str = "uniform"
    halfwidth: float = 0.0

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or pts.size < 2:
            raise DomainError("grid needs at least two points")
        if not np.all(np.diff(pts) > 0):
            raise DomainError("grid points must be strictly increasing")
        if self.spacing_policy not in ("uniform", "symmetric-log"):
            raise DomainError(f"unknown spacing policy {self.spacing_policy!r}")
        if self.spacing_policy == "symmetric-log":
            if pts.size % 2 or np.any(pts == 0.0):
                raise DomainError("symmetric-log grids have an even size and exclude 0")
            if not np.array_equal(pts, -pts[::-1]):
                raise DomainError("symmetric-log grid is not mirror symmetric")
        if self.halfwidth <= 0:
            object.__setattr__(self, "halfwidth", float(max(abs(pts[0]), abs(pts[-1]))))

    @classmethod
    def uniform(cls, halfwidth: float, n: int) -> "Grid":
        return cls(np.linspace(-halfwidth, halfwidth, n), "uniform", float(halfwidth))

    @classmethod
    def linspace(cls, a: float, b: float, n: int) -> "Grid":
        return cls(np.linspace(a, b, n), "uniform", float(max(abs(a), abs(b))))

    @classmethod
    def symmetric_log(cls, n_half: int = 512, kmin: float = 1e-6,
                      halfwidth: float = 50.0) -> "Grid":
        """Mirror-symmetric grid, log-uniform in |k| on [kmin, halfwidth].

        ``n_half`` counts the points on each side, so the grid has
        ``2 * n_half`` points in total.
        """
        if not 0 < kmin < halfwidth:
            raise DomainError("need 0 < kmin < halfwidth")
        pos = np.geomspace(kmin, halfwidth, n_half)
        return cls(np.concatenate([-pos[::-1], pos]), "symmetric-log", float(halfwidth))

    @property
    def size(self) -> int:
        return self.points.size

    @property
    def n_half(self) -> int:
        return self.points.size // 2

    def __len__(self):
        return self.points.size


@dataclass(frozen=True)
class QuadResult:
    value: complex
    abs_error_estimate: float
    evaluations: int

    def __post_init__(self):
        if not self.abs_error_estimate >= 0:
            raise ValueError("error estimate must be non-negative")

    @property
    def real(self) -> float:
        return float(np.real(self.value))


@dataclass(frozen=True)
class RateFit:
    rate: float
    intercept: float
    window: Tuple[float, float]
    residual: float
    npoints: int = 0


@dataclass
class RelaxationSeries:
    """Sampled relaxation curve: ``(tau, value, error)`` triples plus metadata."""

    taus: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.taus = np.asarray(self.taus, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        self.errors = np.asarray(self.errors, dtype=float)
        if not (self.taus.shape == self.values.shape == self.errors.shape):
            raise DomainError("taus, values and errors must have equal lengths")
        if self.taus.size > 1 and not np.all(np.diff(self.taus) > 0):
            raise DomainError("taus must be strictly increasing")

    def __len__(self):
        return self.taus.size


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Real function known on a grid; cubic interpolation, zero outside."""

    x: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.x.shape != self.values.shape:
            raise DomainError("x and values must have the same shape")

    def __call__(self, q):
        spline = self._spline()
        q = np.asarray(q, dtype=float)
        out = np.where((q >= self.x[0]) & (q <= self.x[-1]), spline(q), 0.0)
        return out if out.ndim else float(out)

    def _spline(self):
        sp = self.__dict__.get("_cached_spline")
        if sp is None:
            sp = CubicSpline(self.x, self.values)
            object.__setattr__(self, "_cached_spline", sp)
        return sp

    @property
    def spacing(self) -> float:
        d = np.diff(self.x)
        return float(d.mean())

    def is_uniform(self, rtol=1e-9) -> bool:
        d = np.diff(self.x)
        return bool(np.all(np.abs(d - d[0]) <= rtol * abs(d[0])))


# ---------------------------------------------------------------------------
# quadrature

def _call_vectorized(f, xs):
    try:
        v = np.asarray(f(xs))
        if v.shape == xs.shape:
            return v
    except Exception:
        pass
    return np.array([f(float(x)) for x in xs])


def _is_complex(f, probe: float) -> bool:
    return bool(np.iscomplexobj(np.asarray(f(probe))))


def _quad_real(func, a, b, epsabs, epsrel, limit, weight=None, wvar=None, points=None):
    kw = dict(epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1)
    if weight is not None:
        kw.update(weight=weight, wvar=wvar)
        if math.isinf(b):
            kw.pop("limit")
            kw["limlst"] = max(50, limit // 4)
    elif points is not None and len(points) and not math.isinf(b):
        kw["points"] = points
    out = quad(func, a, b, **kw)
    value, err, info = out[0], out[1], out[2]
    neval = int(info.get("neval", 0)) if isinstance(info, dict) else 0
    if isinstance(info, dict) and "rslst" in info:
        neval = max(neval, 1)
    return float(value), float(abs(err)), max(neval, 1)


def _envelope_cutoff(f, tol, a=0.0, kmax=1e6):
    """First k beyond which sampled |f| stays below tol * peak (or None)."""
    ks = a + np.geomspace(1e-3, kmax, 700)
    mags = np.abs(_call_vectorized(f, ks))
    mags = np.where(np.isfinite(mags), mags, np.inf)
    peak = np.max(mags)
    if not np.isfinite(peak):
        peak = np.max(mags[np.isfinite(mags)], initial=0.0)
    if peak == 0.0:
        return ks[0]
    suffix = np.maximum.accumulate(mags[::-1])[::-1]
    below = np.nonzero(suffix < tol * peak)[0]
    if below.size == 0:
        return None
    return float(ks[below[0]])


def _wynn_epsilon(partial):
    """Extrapolated limit of a sequence of partial sums and a change estimate."""
    e_prev = np.zeros(len(partial) + 1)
    e_cur = np.asarray(partial, dtype=float).copy()
    best, prev_best = e_cur[-1], e_cur[-2]
    for col in range(1, len(partial)):
        with np.errstate(divide="ignore", invalid="ignore"):
            nxt = e_prev[1:len(e_cur)] + 1.0 / np.diff(e_cur)
        e_prev, e_cur = e_cur, nxt
        if col % 2 == 0 and e_cur.size >= 2 and np.all(np.isfinite(e_cur[-2:])):
            prev_best, best = e_cur[-2], e_cur[-1]
        if e_cur.size < 3 or not np.all(np.isfinite(e_cur)):
            break
    return float(best), float(abs(best - prev_best))


def _alternating_tail(f, fr, a, tol, rel_tol, limit):
    # slowly decaying oscillation: integrate between successive sign changes
    # and extrapolate the partial sums
    for span in (200.0, 2000.0, 20000.0):
        xs = a + np.linspace(0.0, span, 20001)[1:]
        vals = np.real(_call_vectorized(f, xs))
        flips = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
        if flips.size >= 40:
            break
    else:
        return None
    zeros = [brentq(fr, xs[i], xs[i + 1], xtol=1e-14) for i in flips[:60]]
    v, e, n = _quad_real(fr, a, zeros[0], tol / 4, rel_tol, limit)
    partial, acc = [], v
    err, nev = e, n
    for lo, hi in zip(zeros[:-1], zeros[1:]):
        v, e, n = _quad_real(fr, lo, hi, tol / 100, rel_tol, limit)
        acc += v
        err += e
        nev += n
        partial.append(acc)
    limit_value, change = _wynn_epsilon(partial)
    return limit_value, err + change, nev


def _panel_edges(a, K, extra=()):
    edges = [a]
    step = 1.0
    x = a + step
    while x < K:
        edges.append(x)
        step *= 2.0
        x = a + step
    edges.append(K)
    edges.extend(p for p in extra if a < p < K)
    return sorted(set(edges))


def integrate(f: Callable, domain: Domain = "semi_infinite", tol: float = CLOSED_FORM_TOL, *,
              weight: Optional[str] = None, wvar=None, points: Sequence[float] = (),
              cutoff: Optional[float] = None, rel_tol: float = 1e-12,
              limit: int = 200, strict: bool = True) -> QuadResult:
    """Adaptive quadrature of a real- or complex-valued function.

    Parameters
    ----------
    f : callable
        Integrand, evaluated at scalar points.
    domain : ``(a, b)``, ``"semi_infinite"`` (``[0, inf)``) or ``"full_line"``
    tol : float
        Absolute tolerance for the whole integral.
    weight, wvar :
        Optional QUADPACK weight (``"cos"``, ``"sin"``, ``"alg"``, ...) as in
        :func:`scipy.integrate.quad`; the integrand is then ``f(k) * w(k)``.
    points :
        Extra breakpoints (kinks, integrable singularities).
    cutoff :
        Truncation point for infinite domains.  By default the integrand is
        sampled and truncated where its envelope falls below ``tol`` times its
        peak; the kept range is split into doubling panels.
    strict :
        Raise :class:`QuadratureError` (carrying the best estimate) when the
        error estimate exceeds ten times the tolerance.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")

    if domain == "full_line":
        if weight not in (None, "cos", "sin"):
            raise DomainError(f"weight {weight!r} not supported on the full line")
        sgn = -1.0 if weight == "sin" else 1.0
        mirrored = lambda k: f(k) + sgn * f(-k)  # noqa: E731
        pts = sorted({abs(p) for p in points if p != 0})
        return integrate(mirrored, "semi_infinite", tol, weight=weight, wvar=wvar,
                         points=pts, cutoff=cutoff, rel_tol=rel_tol, limit=limit,
                         strict=strict)

    if domain == "semi_infinite":
        a, b = 0.0, math.inf
    else:
        try:
            a, b = float(domain[0]), float(domain[1])
        except (TypeError, ValueError, IndexError):
            raise DomainError(f"bad domain {domain!r}") from None
        if not b > a:
            raise DomainError("finite domain needs b > a")

    probe = a + 0.41421356 * (b - a) if math.isfinite(b) else a + 0.70710678
    if _is_complex(f, probe):
        re = integrate(lambda k: np.real(f(k)), (a, b) if math.isfinite(b) else domain,
                       tol / 2, weight=weight, wvar=wvar, points=points, cutoff=cutoff,
                       rel_tol=rel_tol, limit=limit, strict=strict)
        im = integrate(lambda k: np.imag(f(k)), (a, b) if math.isfinite(b) else domain,
                       tol / 2, weight=weight, wvar=wvar, points=points, cutoff=cutoff,
                       rel_tol=rel_tol, limit=limit, strict=strict)
        return QuadResult(complex(re.value, im.value),
                          re.abs_error_estimate + im.abs_error_estimate,
                          re.evaluations + im.evaluations)

    fr = lambda k: float(np.real(f(k)))  # noqa: E731
    if math.isinf(b):
        K = cutoff if cutoff is not None else _envelope_cutoff(f, tol * 1e-2, a)
        if K is None:
            if weight == "alg":
                raise DomainError("algebraic weight needs a finite interval")
            if weight is None:
                tail = _alternating_tail(f, fr, a, tol, rel_tol, limit)
                if tail is not None:
                    return _finish(*tail, tol, rel_tol, strict)
            v, e, n = _quad_real(fr, a, b, tol, rel_tol, limit, weight, wvar)
            return _finish(v, e, n, tol, rel_tol, strict)
        edges = _panel_edges(a, max(K, a + 1.0), points)
        # neglected tail, estimated from |f| on [K, 4K]
        kt = np.linspace(edges[-1], a + 4 * (edges[-1] - a), 33)
        trunc = float(trapezoid(np.abs(_call_vectorized(f, kt)), kt))
    else:
        trunc = 0.0
        edges = [a] + sorted(p for p in points if a < p < b) + [b]

    total, err, nev = 0.0, 0.0, 0
    npan = len(edges) - 1
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e, n = _quad_real(fr, lo, hi, tol / npan, rel_tol, limit, weight, wvar)
        total += v
        err += e
        nev += n
    return _finish(total, err + trunc, nev, tol, rel_tol, strict)


def _finish(value, err, nev, tol, rel_tol, strict):
    if not math.isfinite(value):
        raise QuadratureError("quadrature produced a non-finite value", value, err)
    if strict and err > 10 * max(tol, rel_tol * abs(value)):
        raise QuadratureError(
            f"quadrature did not converge: estimate {value!r} with error {err:.3g} "
            f"(tolerance {tol:.3g})", value, err)
    return QuadResult(value, err, nev)


def integrate_pv_symmetric(f: Callable, tol: float = CLOSED_FORM_TOL, *,
                           points: Sequence[float] = (), cutoff: Optional[float] = None,
                           strict: bool = True) -> QuadResult:
    """Principal value of ``f`` over the real line.

    Panels ``k`` and ``-k`` are summed before integrating, so a ``1/k``
    singularity cancels.  An even ``1/|k|`` part does not cancel; that is
    detected by probing ``k * (f(k) + f(-k))`` near zero.
    """
    mirrored = lambda k: f(k) + f(-k)  # noqa: E731
    probes = [abs(k * mirrored(k)) for k in (1e-7, 1e-9)]
    if probes[1] > 1e-6 and probes[1] > 0.5 * probes[0]:
        raise QuadratureError(
            "principal value does not exist: the even part of the integrand "
            f"behaves like 1/|k| near 0 (|k f| ~ {probes[1]:.3g})")
    pts = sorted({abs(p) for p in points if p != 0})
    return integrate(mirrored, "semi_infinite", tol, points=pts, cutoff=cutoff, strict=strict)


# ---------------------------------------------------------------------------
# fitting

def fit_rate(series: RelaxationSeries, window: Tuple[float, float]) -> RateFit:
    """Least-squares fit of ``log(value)`` against tau inside ``window``.

    Returns the decay constant ``rate`` such that ``value ~ exp(intercept -
    rate * tau)``; ``residual`` is the RMS log-residual.
    """
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise DomainError("fit window needs tau_min < tau_max")
    taus = np.asarray(series.taus, dtype=float)
    vals = np.asarray(series.values, dtype=float)
    mask = (taus >= lo - 1e-12) & (taus <= hi + 1e-12)
    t, v = taus[mask], vals[mask]
    bad = np.nonzero(~(v > 0))[0]
    if bad.size:
        raise DomainError(f"non-positive series value at tau={t[bad[0]]!r}; "
                          "cannot fit an exponential")
    if t.size < 4:
        raise DomainError(f"need at least 4 samples in window {window}, got {t.size}")
    y = np.log(v)
    A = np.column_stack([np.ones_like(t), t])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return RateFit(rate=float(-coef[1]), intercept=float(coef[0]), window=(lo, hi),
                   residual=float(np.sqrt(np.mean(resid ** 2))), npoints=int(t.size))


# ---------------------------------------------------------------------------
# interpolation

class GridInterpolant:
    """Piecewise-cubic interpolation of complex samples on a :class:`Grid`.

    On symmetric-log grids each half is splined in ``log|k|``; the gap
    ``(-kmin, kmin)`` around zero is bridged linearly in ``k``.
    """

    def __init__(self, grid: Grid, values):
        values = np.asarray(values)
        if values.shape != grid.points.shape:
            raise DomainError("values must match the grid")
        self.grid = grid
        self.values = values.astype(complex)
        pts = grid.points
        if grid.spacing_policy == "symmetric-log":
            n = grid.n_half
            self._s_pos = np.log(pts[n:])
            self._s_neg = np.log(-pts[:n][::-1])
            self._pos = (CubicSpline(self._s_pos, self.values[n:].real),
                         CubicSpline(self._s_pos, self.values[n:].imag))
            neg_vals = self.values[:n][::-1]
            self._neg = (CubicSpline(self._s_neg, neg_vals.real),
                         CubicSpline(self._s_neg, neg_vals.imag))
        else:
            self._lin = (CubicSpline(pts, self.values.real), CubicSpline(pts, self.values.imag))

    def __call__(self, query):
        q = np.asarray(query, dtype=float)
        scalar = q.ndim == 0
        q = np.atleast_1d(q)
        pts = self.grid.points
        if np.any(q < pts[0]) or np.any(q > pts[-1]) or np.any(np.isnan(q)):
            worst = q[(q < pts[0]) | (q > pts[-1]) | np.isnan(q)][0]
            raise GridHullError(f"query {worst!r} outside grid hull [{pts[0]}, {pts[-1]}]")
        out = np.empty(q.shape, dtype=complex)
        if self.grid.spacing_policy == "symmetric-log":
            n = self.grid.n_half
            kmin = pts[n]
            pos = q >= kmin
            neg = q <= -kmin
            mid = ~(pos | neg)
            if pos.any():
                s = np.log(q[pos])
                out[pos] = self._pos[0](s) + 1j * self._pos[1](s)
            if neg.any():
                s = np.log(-q[neg])
                out[neg] = self._neg[0](s) + 1j * self._neg[1](s)
            if mid.any():
                lo, hi = self.values[n - 1], self.values[n]
                w = (q[mid] + kmin) / (2 * kmin)
                out[mid] = lo + w * (hi - lo)
        else:
            out[:] = self._lin[0](q) + 1j * self._lin[1](q)
        # exact at nodes
        idx = np.clip(np.searchsorted(pts, q), 0, pts.size - 1)
        hit = pts[idx] == q
        out[hit] = self.values[idx[hit]]
        return out[0] if scalar else out


def interp_complex(grid: Grid, values, query):
    """Interpolate complex grid samples at ``query`` (no extrapolation)."""
    return GridInterpolant(grid, values)(query)


# ---------------------------------------------------------------------------
# small helpers

def derivative(f: Callable, x, h: float = 1e-4):
    """Central difference with one Richardson step (error O(h^4))."""
    x = np.asarray(x, dtype=float)
    d1 = (f(x + h) - f(x - h)) / (2 * h)
    d2 = (f(x + h / 2) - f(x - h / 2)) / h
    return (4 * d2 - d1) / 3


def gauss_legendre(edges: Sequence[float], order: int = 32):
    """Composite Gauss-Legendre nodes and weights on consecutive panels."""
    t, w = np.polynomial.legendre.leggauss(order)
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = (hi - lo) / 2
    nodes = (lo + hi) / 2 + half * t[None, :]
    weights = half * w[None, :]
    return nodes.ravel(), weights.ravel()
