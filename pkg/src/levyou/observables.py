"""Bounded observables and their relaxation functionals.

An observable ``u(x)`` is stored through its Fourier image ``u(k)`` as a sum of
atoms: Dirac spikes ``w delta(k - a)`` and smooth terms (possibly with a
removable point or a principal-value ``1/k`` at the origin).  Pairings with
densities use ``int u(x) f(x) dx = (1/2pi) int u(-k) f(k) dk``.

Distance to equilibrium after time ``tau`` from the initial CF ``p0``::

    Delta_u = (1/2pi) | int u(-k) [p0(kq) D(k) - p_st(k)] dk |,   q = e^-tau

with ``D(k) = exp(-|k|^mu (1 - q^mu)/mu)``.  Stationary autocorrelation::

    c_u = (1/2pi) int u(-k) [h(kq) D(k) - h(0) p_st(k)] dk,
    h(kappa) = int u(x) p_st(x) e^{i kappa x} dx.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, LevyOUError, NumericalError
from .evolve import CharFn, stable_sf, stationary_cf
from .numerics import (Grid, GridInterpolant, RelaxationSeries, gauss_legendre,
                       integrate, integrate_pv_symmetric)

NONE, REMOVABLE, PV = "none", "removable_at_0", "principal_value_1_over_k"

DEFAULT_TOL = 1e-10
GRID_PIPELINE_TOL = 1e-8
# accuracy of the tabulated stable survival function (closed forms are exact)
_SF_ERROR = 1e-8


@dataclass(frozen=True)
class DiracAtom:
    weight: complex
    location: float


@dataclass(frozen=True)
class SmoothAtom:
    evaluator: Callable
    singularity: str = NONE

    def __post_init__(self):
        if self.singularity not in (NONE, REMOVABLE, PV):
            raise DomainError(f"unknown singularity kind {self.singularity!r}")


Atom = Union[DiracAtom, SmoothAtom]


@dataclass(frozen=True, eq=False)
class ObservableSpectrum:
    """Fourier image of a bounded observable.

    ``real`` is the real-space evaluator (used by simulations and by the
    inner transform of the autocorrelation), ``support`` an optional compact
    support interval, ``square`` the spectrum of ``u^2``.  A piecewise
    constant observable may list ``steps`` ``(b, j)`` with
    ``u(x) = sum j [x > b]``; its autocorrelation then has a real-space route.
    """

    atoms: Tuple[Atom, ...]
    parity: str = "none"
    name: str = ""
    real: Optional[Callable] = None
    support: Optional[Tuple[float, float]] = None
    bound: float = 1.0
    square_factory: Optional[Callable] = field(default=None, repr=False)
    steps: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "steps", tuple((float(b), float(j)) for b, j in self.steps))
        if self.parity not in ("even", "odd", "none"):
            raise DomainError(f"parity must be even, odd or none, got {self.parity!r}")

    def fourier(self, k):
        """Smooth part of ``u(k)`` (Dirac atoms are not representable pointwise)."""
        k = np.asarray(k, dtype=float)
        out = np.zeros(k.shape, dtype=complex)
        for a in self.atoms:
            if isinstance(a, SmoothAtom):
                out = out + a.evaluator(k)
        return out

    @property
    def is_dirac_only(self) -> bool:
        return all(isinstance(a, DiracAtom) for a in self.atoms)

    def square(self) -> "ObservableSpectrum":
        if self.square_factory is None:
            raise DomainError(f"no spectrum for the square of observable {self.name!r}")
        return self.square_factory()

    def __call__(self, x):
        if self.real is None:
            raise DomainError(f"observable {self.name!r} has no real-space evaluator")
        return self.real(x)


# ---------------------------------------------------------------------------
# builtin observables

def _safe_div(num, k, limit):
    k = np.asarray(k, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(k == 0, limit, num / np.where(k == 0, 1.0, k))
    return out


def constant(c: float = 1.0) -> ObservableSpectrum:
    return ObservableSpectrum((DiracAtom(2 * math.pi * c, 0.0),), "even", f"const({c:g})",
                              real=lambda x: np.full(np.shape(x), float(c)),
                              bound=abs(c), square_factory=lambda: constant(c * c))


def cosine(a: float, amplitude: float = 1.0) -> ObservableSpectrum:
    w = math.pi * amplitude
    return ObservableSpectrum(
        (DiracAtom(w, a), DiracAtom(w, -a)), "even", f"cos({a:g}x)",
        real=lambda x: amplitude * np.cos(a * np.asarray(x, dtype=float)), bound=abs(amplitude),
        square_factory=lambda: _sum_of(constant(amplitude ** 2 / 2),
                                       cosine(2 * a, amplitude ** 2 / 2), f"cos({a:g}x)^2"))


def sine(a: float, amplitude: float = 1.0) -> ObservableSpectrum:
    w = 1j * math.pi * amplitude
    return ObservableSpectrum(
        (DiracAtom(w, a), DiracAtom(-w, -a)), "odd", f"sin({a:g}x)",
        real=lambda x: amplitude * np.sin(a * np.asarray(x, dtype=float)), bound=abs(amplitude),
        square_factory=lambda: _sum_of(constant(amplitude ** 2 / 2),
                                       cosine(2 * a, -amplitude ** 2 / 2), f"sin({a:g}x)^2"))


def _sum_of(u: ObservableSpectrum, v: ObservableSpectrum, name: str) -> ObservableSpectrum:
    parity = u.parity if u.parity == v.parity else "none"
    ru, rv = u.real, v.real
    return ObservableSpectrum(u.atoms + v.atoms, parity, name,
                              real=lambda x: ru(x) + rv(x), bound=u.bound + v.bound)


def sign_observable() -> ObservableSpectrum:
    return ObservableSpectrum(
        (SmoothAtom(lambda k: 2j * _safe_div(1.0, k, 0.0), PV),), "odd", "sign",
        real=lambda x: np.sign(np.asarray(x, dtype=float)),
        square_factory=lambda: constant(1.0))


def box(half_width: float = 2.0) -> ObservableSpectrum:
    L = float(half_width)
    return ObservableSpectrum(
        (SmoothAtom(lambda k: 2 * _safe_div(np.sin(L * np.asarray(k, dtype=float)), k, L),
                    REMOVABLE),), "even", f"box({L:g})",
        real=lambda x: (np.abs(np.asarray(x, dtype=float)) <= L).astype(float),
        support=(-L, L), square_factory=lambda: box(L), steps=((-L, 1.0), (L, -1.0)))


def signed_box(half_width: float = 2.0) -> ObservableSpectrum:
    L = float(half_width)
    return ObservableSpectrum(
        (SmoothAtom(lambda k: 2j * _safe_div(1 - np.cos(L * np.asarray(k, dtype=float)), k, 0.0),
                    REMOVABLE),), "odd", f"signed_box({L:g})",
        real=lambda x: np.sign(x) * (np.abs(np.asarray(x, dtype=float)) <= L),
        support=(-L, L), square_factory=lambda: box(L),
        steps=((-L, -1.0), (0.0, 2.0), (L, -1.0)))


BUILTIN_NAMES = ("cos_half", "sin_half", "sign", "box2", "signed_box2")


def builtin_observable(name: str) -> ObservableSpectrum:
    """``cos_half``, ``sin_half``, ``sign``, ``box2`` (indicator of [-2, 2]) or ``signed_box2``."""
    table = {
        "cos_half": lambda: _renamed(cosine(0.5), "cos_half"),
        "sin_half": lambda: _renamed(sine(0.5), "sin_half"),
        "sign": sign_observable,
        "box2": lambda: _renamed(box(2.0), "box2"),
        "signed_box2": lambda: _renamed(signed_box(2.0), "signed_box2"),
    }
    try:
        return table[name]()
    except KeyError:
        raise DomainError(f"unknown observable {name!r}; choose from {', '.join(BUILTIN_NAMES)}") \
            from None


def _renamed(u: ObservableSpectrum, name: str) -> ObservableSpectrum:
    return ObservableSpectrum(u.atoms, u.parity, name, u.real, u.support, u.bound,
                              u.square_factory, u.steps)


# ---------------------------------------------------------------------------
# pairing with a Fourier-space function

@dataclass(frozen=True)
class Pairing:
    value: complex
    abs_error_estimate: float


def pair(u: ObservableSpectrum, F: Callable, tol: float = DEFAULT_TOL) -> Pairing:
    """``(1/2pi) int u(-k) F(k) dk`` for a vectorized complex ``F``."""
    total, err = 0j, 0.0
    for a in u.atoms:
        if isinstance(a, DiracAtom):
            total += a.weight * complex(F(np.array(-a.location))) / (2 * math.pi)
            continue
        U = a.evaluator

        def integrand(k, U=U):
            k = np.asarray(k, dtype=float)
            return U(-k) * F(k)

        res = integrate_pv_symmetric(integrand, tol)
        total += res.value / (2 * math.pi)
        err += res.abs_error_estimate / (2 * math.pi)
    return Pairing(complex(total), err)


def expectation(u: ObservableSpectrum, p: Union[CharFn, Callable], tol: float = DEFAULT_TOL) -> float:
    """``int u(x) p(x) dx`` for a density given by its CF."""
    return float(np.real(pair(u, p, tol).value))


def stationary_mean(u: ObservableSpectrum, mu: float, tol: float = DEFAULT_TOL) -> float:
    return expectation(u, lambda k: stationary_cf(mu, k), tol)


def stationary_variance(u: ObservableSpectrum, mu: float, tol: float = DEFAULT_TOL) -> float:
    m = stationary_mean(u, mu, tol)
    return stationary_mean(u.square(), mu, tol) - m * m


# ---------------------------------------------------------------------------
# distance to equilibrium

def _decay(mu, q, k):
    return np.exp(np.abs(k) ** mu * np.expm1(mu * math.log(q)) / mu) if q < 1 else np.ones_like(k)


def delta_pairing(u: ObservableSpectrum, p0: CharFn, mu: float, tau: float,
                  tol: float = DEFAULT_TOL) -> Pairing:
    if not tau >= 0:
        raise DomainError(f"tau must be non-negative, got {tau!r}")
    q = math.exp(-tau)

    def bracket(k):
        k = np.asarray(k, dtype=float)
        return np.asarray(p0(k * q), dtype=complex) * _decay(mu, q, k) - stationary_cf(mu, k)

    return pair(u, bracket, tol)


def delta_u(u: ObservableSpectrum, p0: CharFn, mu: float, tau: float,
            tol: float = DEFAULT_TOL) -> float:
    """Distance ``|<u>_tau - <u>_st|`` of the ensemble mean from equilibrium."""
    return abs(float(np.real(delta_pairing(u, p0, mu, tau, tol).value)))


# ---------------------------------------------------------------------------
# weighted stationary transform  h(kappa) = int u(x) p_st(x) e^{i kappa x} dx

@lru_cache(maxsize=16)
def _stationary_density_cheb(mu: float, half_width: float, n: int = 49):
    # even density on [0, L] from a Chebyshev fit to quadrature samples
    from .eigen import EigenFunction, phi_real_closed, phi_real_numeric
    ef = EigenFunction("even", 0.0, mu)
    if mu in (1.0, 2.0):
        return lambda x: phi_real_closed("even", 0.0, mu, x)
    L = half_width
    xs = L / 2 * (1 + np.cos(np.pi * np.arange(n) / (n - 1)))
    cheb = np.polynomial.chebyshev.Chebyshev.fit(xs, phi_real_numeric(ef, xs), n - 1,
                                                  domain=[0, L])
    return lambda x: cheb(np.abs(np.asarray(x, dtype=float)))


class WeightedTransform:
    """``h(kappa)`` for one observable under the stationary law of order ``mu``."""

    def __init__(self, u: ObservableSpectrum, mu: float, tol: float = DEFAULT_TOL):
        self.u, self.mu, self.tol = u, float(mu), tol
        if u.is_dirac_only:
            self._kind = "dirac"
        elif u.support is not None and u.real is not None:
            self._kind = "compact"
            lo, hi = u.support
            self._pst = _stationary_density_cheb(self.mu, max(abs(lo), abs(hi)))
            self._nodes_cache = {}
        else:
            self._kind = "tabulated"
            self._table = None

    @property
    def is_tabulated(self) -> bool:
        return self._kind == "tabulated"

    # h(0) = <u>_st
    def mean(self) -> float:
        return float(np.real(self(np.array(0.0))))

    def __call__(self, kappa):
        kappa = np.asarray(kappa, dtype=float)
        if self._kind == "dirac":
            out = np.zeros(kappa.shape, dtype=complex)
            for a in self.u.atoms:
                out = out + a.weight * stationary_cf(self.mu, kappa - a.location)
            return out / (2 * math.pi)
        if self._kind == "compact":
            return self._compact(kappa)
        return self._tabulated(kappa)

    def _nodes(self, panels: int):
        got = self._nodes_cache.get(panels)
        if got is None:
            lo, hi = self.u.support
            mid = 0.5 * (lo + hi)
            edges = np.concatenate([np.linspace(lo, mid, panels + 1),
                                    np.linspace(mid, hi, panels + 1)[1:]])
            x, w = gauss_legendre(edges, 20)
            got = (x, w * self.u.real(x) * self._pst(x))
            self._nodes_cache[panels] = got
        return got

    def _compact(self, kappa):
        lo, hi = self.u.support
        out = np.empty(kappa.shape, dtype=complex)
        flat = kappa.ravel()
        res = out.ravel()
        for i, kv in enumerate(flat):
            panels = 1 << max(2, math.ceil(math.log2(max(1.0, abs(kv) * (hi - lo) / 8 + 1))))
            x, wu = self._nodes(panels)
            res[i] = np.dot(wu, np.exp(1j * kv * x))
        return res.reshape(kappa.shape)

    def _build_table(self, halfwidth: float = 2000.0, n_half: int = 256):
        grid = Grid.symmetric_log(n_half, 1e-6, halfwidth)
        pos = grid.points[n_half:]
        vals = np.array([self._direct(float(kv)) for kv in pos])
        if self.u.parity == "odd":
            neg = -vals[::-1]
        elif self.u.parity == "even":
            neg = vals[::-1]
        else:
            neg = np.array([self._direct(float(kv)) for kv in grid.points[:n_half]])
        self._table = GridInterpolant(grid, np.concatenate([neg, vals]))

    def _direct(self, kv: float) -> complex:
        # (1/2pi) PV int u(k') p_st(kv - k') dk'
        total = 0j
        for a in self.u.atoms:
            if isinstance(a, DiracAtom):
                total += a.weight * stationary_cf(self.mu, kv - a.location) / (2 * math.pi)
                continue
            U = a.evaluator
            f = lambda k, U=U: U(np.asarray(k, dtype=float)) * stationary_cf(self.mu, kv - np.asarray(k))  # noqa: E731,E501
            pts = [abs(kv)] if kv != 0 else []
            total += integrate_pv_symmetric(f, self.tol, points=pts).value / (2 * math.pi)
        return total

    def _tabulated(self, kappa):
        if self._table is None:
            self._build_table()
        return self._table(np.clip(kappa, -2000.0, 2000.0))


@lru_cache(maxsize=32)
def _weighted_transform_cached(name: str, mu: float) -> WeightedTransform:
    return WeightedTransform(builtin_observable(name), mu)


def weighted_transform(u: ObservableSpectrum, mu: float) -> WeightedTransform:
    if u.name in BUILTIN_NAMES:
        return _weighted_transform_cached(u.name, float(mu))
    return WeightedTransform(u, mu)


# ---------------------------------------------------------------------------
# stationary autocorrelation

def corr_pairing(u: ObservableSpectrum, mu: float, tau: float, tol: float = DEFAULT_TOL) -> Pairing:
    if not tau >= 0:
        raise DomainError(f"tau must be non-negative, got {tau!r}")
    if tau == 0.0:
        # no decay factor at tau = 0; use <u^2> - <u>^2 directly
        return Pairing(stationary_variance(u, mu, tol), 0.0)
    if u.steps and u.support is not None:
        return _corr_steps(u, float(mu), float(tau))
    h = weighted_transform(u, mu)
    if h.is_tabulated:
        # spline-interpolated inner transform: grid-pipeline tolerance
        tol = max(tol, GRID_PIPELINE_TOL)
    h0 = h.mean()
    q = math.exp(-tau)

    def bracket(k):
        k = np.asarray(k, dtype=float)
        return h(k * q) * _decay(mu, q, k) - h0 * stationary_cf(mu, k)

    return pair(u, bracket, tol)


def _step_panels(u: ObservableSpectrum, q: float, sigma: float):
    lo, hi = u.support
    edges = {lo, hi}
    edges.update(b for b, _ in u.steps if lo < b < hi)
    # the conditional mean changes over a width sigma/q around x0 = b/q
    w = sigma / q
    for b, _ in u.steps:
        c = b / q
        for r in 2.0 ** np.arange(-3, 12):
            for e in (c - r * w, c + r * w, c):
                if lo < e < hi:
                    edges.add(float(e))
    edges = np.array(sorted(edges))
    # no panel wider than a quarter of the support
    fine = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        n = max(1, math.ceil(4 * (b - a) / (hi - lo)))
        fine.extend(np.linspace(a, b, n + 1)[1:])
    return np.array(fine)


def _corr_steps(u: ObservableSpectrum, mu: float, tau: float) -> Pairing:
    """``int u(x0) p_st(x0) (E[u(x_tau) | x0] - <u>) dx0`` in real space.

    For ``u = sum j [x > b]`` the conditional mean is
    ``sum j P(Z > (b - q x0) / sigma)`` with ``Z`` standard stable and
    ``sigma^mu = (1 - q^mu) / mu``; the stationary mean is the ``q = 0``
    limit of the same sum, so the bracket vanishes smoothly at large ``tau``.
    """
    q = math.exp(-tau)
    sigma = (-math.expm1(mu * math.log(q)) / mu) ** (1.0 / mu)
    scale_st = mu ** (-1.0 / mu)
    lo, hi = u.support
    pst = _stationary_density_cheb(mu, max(abs(lo), abs(hi)))
    edges = _step_panels(u, q, sigma)
    mean = sum(j * stable_sf(mu, b / scale_st) for b, j in u.steps)

    def estimate(order):
        x, w = gauss_legendre(edges, order)
        cond = sum(j * stable_sf(mu, (b - q * x) / sigma) for b, j in u.steps)
        return float(np.dot(w * u.real(x) * pst(x), cond - mean))

    coarse, fine = estimate(12), estimate(24)
    jumps = sum(abs(j) for _, j in u.steps)
    return Pairing(complex(fine), abs(fine - coarse) + _SF_ERROR * jumps)


def corr_u(u: ObservableSpectrum, mu: float, tau: float, tol: float = DEFAULT_TOL) -> float:
    """Stationary autocovariance ``<u(t+tau) u(t)> - <u>^2``."""
    return float(np.real(corr_pairing(u, mu, tau, tol).value))


# ---------------------------------------------------------------------------
# series

def _series(fn, taus, meta):
    taus = np.asarray(taus, dtype=float)
    vals, errs, ok_t, failed = [], [], [], []
    for t in taus:
        try:
            p = fn(float(t))
        except LevyOUError as exc:
            failed.append((float(t), str(exc)))
            continue
        ok_t.append(t)
        vals.append(p[0])
        errs.append(p[1])
    if len(ok_t) < 0.8 * taus.size:
        raise NumericalError(f"{len(failed)} of {taus.size} series points failed; first: "
                             f"tau={failed[0][0]}: {failed[0][1]}")
    meta = dict(meta)
    if failed:
        meta["failed"] = failed
    return RelaxationSeries(np.array(ok_t), np.array(vals), np.array(errs), meta)


def delta_series(u: ObservableSpectrum, p0: CharFn, mu: float, taus: Sequence[float],
                 tol: float = DEFAULT_TOL) -> RelaxationSeries:
    def one(t):
        p = delta_pairing(u, p0, mu, t, tol)
        return abs(float(np.real(p.value))), p.abs_error_estimate

    return _series(one, taus, {"observable": u.name, "mu": mu, "initial": p0.label,
                               "quantity": "delta"})


def corr_series(u: ObservableSpectrum, mu: float, taus: Sequence[float],
                tol: float = DEFAULT_TOL) -> RelaxationSeries:
    def one(t):
        p = corr_pairing(u, mu, t, tol)
        return float(np.real(p.value)), p.abs_error_estimate

    return _series(one, taus, {"observable": u.name, "mu": mu, "initial": "stationary",
                               "quantity": "corr"})
