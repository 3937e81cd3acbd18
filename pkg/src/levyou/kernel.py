"""Nonlinear wave-number rescaling and its real-space kernels.

The transform with parameters ``(mu, alpha)`` acts on characteristic
functions by ``[T p](kappa) = p(alpha^(1/mu) sign(kappa) |kappa|^(1/alpha))``.
It carries the fractional equation of order ``mu`` into the one of order
``mu/alpha`` with time scaled by ``alpha``.  For ``(1, 1/2)`` (Cauchy to
Gaussian) and its inverse ``(2, 2)`` the real-space kernels are closed-form
in the Fresnel auxiliary function ``g``::

    T_(1,1/2)(chi, x) = g(z) / sqrt(pi |x|)
    T_(2,2)(x, chi)   = -z g(z) / |x|,        z = -sign(x) chi / sqrt(pi |x|)
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import specfun
from .errors import DomainError
from .evolve import CharFn, propagate
from .numerics import Grid, SampledFunction, integrate

T1_HALF = "T1_half"
T2_2 = "T2_2"
_KERNEL_ALIASES = {"t1_half": T1_HALF, "t1half": T1_HALF, "t2_2": T2_2, "t22": T2_2}

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class TransformSpec:
    mu: float
    alpha: float

    def __post_init__(self):
        if not 0 < self.mu <= 2:
            raise DomainError(f"mu must lie in (0, 2], got {self.mu!r}")
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")

    @property
    def target_mu(self) -> float:
        return self.mu / self.alpha

    @property
    def time_factor(self) -> float:
        return self.alpha

    def inverse(self) -> "TransformSpec":
        return TransformSpec(self.mu / self.alpha, 1.0 / self.alpha)

    def k_of_kappa(self, kappa):
        kappa = np.asarray(kappa, dtype=float)
        return self.alpha ** (1.0 / self.mu) * np.sign(kappa) * np.abs(kappa) ** (1.0 / self.alpha)

    def kappa_of_k(self, k):
        return self.inverse().k_of_kappa(k)


def transform_cf(spec: TransformSpec, p: CharFn) -> CharFn:
    """Apply the wave-number rescaling to a characteristic function.

    Closed-form input composes evaluators.  Grid input is carried exactly:
    the nodes are mapped by the inverse rescaling and keep their values, so
    no interpolation happens (a symmetric-log grid stays symmetric-log).
    """
    target_mu = spec.target_mu
    if p.variant == "grid":
        pts = spec.kappa_of_k(p.grid.points)
        grid = Grid(pts, p.grid.spacing_policy, float(np.max(np.abs(pts))))
        return CharFn.from_grid(grid, p.values.copy(), target_mu, f"T[{p.label}]")
    fn = p._fn
    return CharFn.closed(lambda kappa: fn(spec.k_of_kappa(kappa)), target_mu, f"T[{p.label}]")


# ---------------------------------------------------------------------------
# Fresnel scaling function

def g_aux(z):
    """Fresnel auxiliary function ``g(z)``."""
    return specfun.fresnel_aux(z)[1]


def zg(z):
    """The kernel scaling function ``z g(z)``."""
    z = np.asarray(z, dtype=float)
    out = z * specfun.fresnel_aux(z)[1]
    return float(out) if out.ndim == 0 else out


def _kernel_id(spec_id: str) -> str:
    try:
        return _KERNEL_ALIASES[str(spec_id).lower()]
    except KeyError:
        raise DomainError(f"unknown kernel {spec_id!r}; use T1_half or T2_2") from None


def kernel_real(spec_id: str, first, second):
    """Real-space kernel value.

    ``T1_half`` takes ``(chi, x)``, ``T2_2`` takes ``(x, chi)``.  ``x = 0`` is
    the singular line of both kernels and is rejected.  ``chi = 0`` needs no
    special casing in this form (``g(0) = 1/2``).
    """
    kid = _kernel_id(spec_id)
    if kid == T1_HALF:
        chi, x = np.asarray(first, dtype=float), np.asarray(second, dtype=float)
    else:
        x, chi = np.asarray(first, dtype=float), np.asarray(second, dtype=float)
    if np.any(x == 0):
        raise DomainError("kernel is singular at x = 0")
    root = np.sqrt(math.pi * np.abs(x))
    z = -np.sign(x) * chi / root
    g = g_aux(z)
    out = g / root if kid == T1_HALF else -z * g / np.abs(x)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# kernels applied to densities

Density = Union[Callable, SampledFunction]


def _as_callable(f: Density) -> Callable:
    return f if callable(f) else (lambda v: f(v))


def _t1_point(f: Callable, chi: float, tol: float) -> float:
    total = 0.0
    for s in (1.0, -1.0):
        c = -s * chi / SQRT_PI
        # r = |x| = t^2; z = c / t.  For z < 0 split g into the bounded part
        # -g(|z|) and the oscillating part cos(theta) + sin(theta).
        sg = 1.0 if c >= 0 else -1.0
        ac = abs(c)

        def smooth(t):
            t = np.asarray(t, dtype=float)
            with np.errstate(divide="ignore"):
                zz = np.where(t > 0, ac / np.where(t > 0, t, 1.0), np.inf)
            gz = np.where(np.isinf(zz), 0.0, g_aux(np.where(np.isinf(zz), 0.0, zz)))
            if ac == 0.0:
                gz = np.full_like(t, 0.5)
            return (2 / SQRT_PI) * sg * gz * f(s * t * t)

        total += integrate(smooth, "semi_infinite", tol / 4).value
        if c < 0:
            omega = chi * chi / 2

            def h(v):
                # v = 1/|x|; the density tail makes the integrand vanish at v = 0
                return v ** -1.5 * f(s / v) if v > 0 else 0.0
            for w in ("cos", "sin"):
                head = integrate(h, (0.0, 1.0), tol / 8, weight=w, wvar=omega).value
                tail = integrate(h, (1.0, math.inf), tol / 8, weight=w, wvar=omega).value
                total += (head + tail) / SQRT_PI
    return total


def _t22_point(q: Callable, x: float, tol: float) -> float:
    s = 1.0 if x > 0 else -1.0
    a = math.sqrt(math.pi * abs(x))
    smooth = lambda w: zg(w) * (q(-s * a * w) + q(s * a * w))  # noqa: E731
    part = integrate(smooth, "semi_infinite", tol / 3).value
    h = lambda v: q(s * a * np.sqrt(v))  # noqa: E731
    osc = 0.0
    for w in ("cos", "sin"):
        osc += integrate(h, (0.0, 1.0), tol / 6, weight=w, wvar=math.pi / 2).value
        osc += integrate(h, (1.0, math.inf), tol / 6, weight=w, wvar=math.pi / 2).value
    return -math.sqrt(math.pi / abs(x)) * (part - 0.5 * osc)


def apply_kernel_density(spec_id: str, f: Density, points, tol: float = 1e-9) -> SampledFunction:
    """Integrate the real-space kernel against a density, point by point.

    For ``T1_half`` the output coordinate is ``chi`` and the integral runs over
    ``x``; for ``T2_2`` the roles swap.  The oscillating part of the kernel
    (where ``z -> -inf``) is integrated with Fourier-weighted quadrature after
    mapping it to a linear phase.
    """
    kid = _kernel_id(spec_id)
    fn = _as_callable(f)
    pts = np.asarray(points.points if isinstance(points, Grid) else points, dtype=float)
    if kid == T2_2 and np.any(pts == 0):
        raise DomainError("T2_2 output is singular at x = 0; exclude it from the grid")
    point = _t1_point if kid == T1_HALF else _t22_point
    vals = np.array([point(fn, float(v), tol) for v in pts.ravel()]).reshape(pts.shape)
    return SampledFunction(pts, vals, label=f"{kid}[density]")


# ---------------------------------------------------------------------------
# conjugation of the evolution equations

def pde_conjugation_check(mu: float, alpha: float, p0: CharFn, tau: float, kappa=None) -> float:
    """Max deviation between transforming-then-evolving and evolving-then-transforming.

    Compares ``T[propagate(p0, tau; mu)]`` with
    ``propagate(T[p0], alpha tau; mu/alpha)`` on the wave numbers ``kappa``
    (default: 2001 points on [-10, 10]).
    """
    spec = TransformSpec(mu, alpha)
    if spec.target_mu > 2 + 1e-12:
        raise DomainError(f"target order mu/alpha = {spec.target_mu} exceeds 2")
    if kappa is None:
        kappa = np.linspace(-10.0, 10.0, 2001)
    kappa = np.asarray(kappa, dtype=float)
    lhs = transform_cf(spec, propagate(p0, tau, mu))
    rhs = propagate(transform_cf(spec, p0), alpha * tau, spec.target_mu)
    return float(np.max(np.abs(lhs(kappa) - rhs(kappa))))
