"""Special functions used by the closed-form eigenfunctions and kernels.

Gamma and erf come from :mod:`math` (correctly rounded libm implementations).
Kummer M, Tricomi U, the Fresnel integrals with their auxiliary functions,
Hermite and Laguerre polynomials are implemented here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError

SQRT_PI = math.sqrt(math.pi)

_TAYLOR_MAX_Z = 50.0
_MAX_TERMS = 2000


@dataclass(frozen=True)
class HypergeomArgs:
    a: float
    b: float
    z: float


def _is_nonpos_int(v: float) -> bool:
    return v <= 0 and float(v).is_integer()


# ---------------------------------------------------------------------------
# gamma family

def gamma(x: float) -> float:
    """Euler's Gamma function; poles at 0, -1, -2, ... raise DomainError."""
    x = float(x)
    if _is_nonpos_int(x):
        raise DomainError(f"gamma has a pole at x={x!r}")
    try:
        return math.gamma(x)
    except OverflowError:
        raise NumericalError(f"gamma({x!r}) overflows") from None


def rgamma(x: float) -> float:
    """1/Gamma(x), equal to 0 at the poles."""
    x = float(x)
    if _is_nonpos_int(x):
        return 0.0
    if x > 171.6:
        return 0.0
    return 1.0 / math.gamma(x)


def pochhammer(a: float, n: int) -> float:
    """Rising factorial (a)_n = a (a+1) ... (a+n-1)."""
    if n < 0:
        raise DomainError("pochhammer needs n >= 0")
    out = 1.0
    for j in range(n):
        out *= a + j
    return out


def erf(x):
    if np.ndim(x):
        return np.vectorize(math.erf, otypes=[float])(x)
    return math.erf(float(x))


def erfc(x):
    if np.ndim(x):
        return np.vectorize(math.erfc, otypes=[float])(x)
    return math.erfc(float(x))


# ---------------------------------------------------------------------------
# confluent hypergeometric functions

def _m_polynomial(n: int, b: float, z: float) -> float:
    # a = -n: finite sum, exact up to rounding
    term, total = 1.0, 1.0
    for j in range(n):
        term *= (-n + j) / (b + j) * z / (j + 1)
        total += term
    return total


def _m_taylor(a: float, b: float, z: float) -> float:
    term, total = 1.0, 1.0
    for j in range(_MAX_TERMS):
        term *= (a + j) / (b + j) * z / (j + 1)
        total += term
        if term == 0.0 or (abs(term) < 1e-17 * abs(total) and j > abs(z)):
            return total
        if not math.isfinite(total):
            break
    raise NumericalError(f"Kummer series did not converge for a={a}, b={b}, z={z}")


class _AsymptoticInaccurate(Exception):
    pass


def _asym_sum(p: float, q: float, w: float) -> float:
    """sum_s (p)_s (q)_s / s! * w**s, stopped at the smallest term."""
    term, total, best = 1.0, 1.0, math.inf
    for s in range(200):
        nxt = term * (p + s) * (q + s) / (s + 1) * w
        if nxt == 0.0:
            return total
        if abs(nxt) >= best:
            break
        best = abs(nxt)
        term = nxt
        total += term
        if abs(term) < 1e-17 * abs(total):
            return total
    if best > 1e-15 * abs(total):
        raise _AsymptoticInaccurate
    return total


def _m_asymptotic_pos(a: float, b: float, z: float) -> float:
    # z > 0 large: dominant e^z z^(a-b) branch plus the algebraic branch
    lead = 0.0
    if not _is_nonpos_int(a):
        lg_b, sg_b = math.lgamma(b), math.copysign(1.0, math.gamma(b)) if b < 171 else 1.0
        lg_a = math.lgamma(a)
        sg_a = math.copysign(1.0, math.gamma(a)) if a < 171 else 1.0
        log_mag = z + (a - b) * math.log(z) + lg_b - lg_a
        if log_mag > 709.0:
            raise NumericalError(
                f"kummer_m({a}, {b}, {z}) overflows: magnitude ~ 10^{log_mag / math.log(10):.1f}")
        lead = sg_b * sg_a * math.exp(log_mag) * _asym_sum(1 - a, b - a, 1.0 / z)
    alg = 0.0
    rg = rgamma(b - a)
    if rg != 0.0:
        alg = gamma(b) * rg * math.cos(math.pi * a) * z ** (-a) * _asym_sum(a, a - b + 1, -1.0 / z)
    return lead + alg


def _m_asymptotic_neg(a: float, b: float, r: float) -> float:
    # z = -r, r large; the e^{-r} branch is below double precision here
    rg = rgamma(b - a)
    return gamma(b) * rg * r ** (-a) * _asym_sum(a, a - b + 1, 1.0 / r)


def _kummer_scalar(a: float, b: float, z: float, method: str = "auto") -> float:
    if _is_nonpos_int(b):
        raise DomainError(f"kummer_m undefined for b={b!r} (non-positive integer)")
    if z == 0.0:
        return 1.0
    if _is_nonpos_int(a):
        return _m_polynomial(int(-a), b, z)
    if method == "taylor":
        return _m_taylor(a, b, z)
    if z < 0:
        if _is_nonpos_int(b - a):
            return math.exp(z) * _m_polynomial(int(a - b), b, -z)
        if -z > _TAYLOR_MAX_Z:
            try:
                return _m_asymptotic_neg(a, b, -z)
            except _AsymptoticInaccurate:
                pass
        return math.exp(z) * _m_taylor(b - a, b, -z)
    if z > _TAYLOR_MAX_Z:
        try:
            return _m_asymptotic_pos(a, b, z)
        except _AsymptoticInaccurate:
            pass
    if z > 700.0:
        raise NumericalError(f"kummer_m({a}, {b}, {z}): argument too large for the series")
    return _m_taylor(a, b, z)


def kummer_m(a, b=None, z=None, *, method: str = "auto"):
    """Kummer's confluent hypergeometric function M(a, b, z).

    Accepts either ``kummer_m(HypergeomArgs(a, b, z))`` or ``kummer_m(a, b, z)``
    with ``z`` scalar or array.  Negative ``z`` goes through the Kummer
    transformation ``M(a,b,z) = e^z M(b-a,b,-z)`` so the series has terms of
    one sign.  ``method="taylor"`` forces the raw power series.
    """
    if isinstance(a, HypergeomArgs):
        a, b, z = a.a, a.b, a.z
    a, b = float(a), float(b)
    if np.ndim(z):
        zz = np.asarray(z, dtype=float)
        return np.array([_kummer_scalar(a, b, float(v), method) for v in zz.ravel()]
                        ).reshape(zz.shape)
    return _kummer_scalar(a, b, float(z), method)


def tricomi_u(a, b=None, z=None) -> complex:
    """Tricomi's confluent hypergeometric function U(a, b, z) for real z.

    Uses the two-term combination
    ``G(1-b)/G(a-b+1) M(a,b,z) + G(b-1)/G(a) z^(1-b) M(a-b+1,2-b,z)``
    with the principal branch of ``z^(1-b)`` (complex for z < 0).  A term
    whose reciprocal Gamma weight vanishes is dropped.
    """
    if isinstance(a, HypergeomArgs):
        a, b, z = a.a, a.b, a.z
    a, b, z = float(a), float(b), float(z)
    if float(b).is_integer():
        raise DomainError(f"tricomi_u two-term form needs non-integer b, got {b!r}")
    w1, w2 = rgamma(a - b + 1), rgamma(a)
    if w1 == 0.0 and w2 == 0.0:
        raise DomainError(f"tricomi_u: both Gamma weights vanish at a={a}, b={b}")
    out = 0j
    if w1 != 0.0:
        out += gamma(1 - b) * w1 * _kummer_scalar(a, b, z)
    if w2 != 0.0:
        if z == 0.0:
            power = 0j if 1 - b > 0 else complex(math.inf)
        else:
            power = complex(z) ** (1 - b)
        out += gamma(b - 1) * w2 * power * _kummer_scalar(a - b + 1, 2 - b, z)
    return complex(out)


# ---------------------------------------------------------------------------
# Fresnel integrals

_SERIES_MAX = 1.6
_CF_DEPTH = 100


def _fresnel_series(x):
    # C = sum (-1)^n (pi/2)^(2n) x^(4n+1) / ((2n)! (4n+1)), S likewise
    t = (math.pi / 2) * x * x
    c = np.zeros_like(x)
    s = np.zeros_like(x)
    pc = x.copy()              # (pi/2 x^2)^(2n) x / (2n)!
    ps = x * t                 # (pi/2 x^2)^(2n+1) x / (2n+1)!
    for n in range(30):
        c += pc / (4 * n + 1)
        s += ps / (4 * n + 3)
        pc = -pc * t * t / ((2 * n + 1) * (2 * n + 2))
        ps = -ps * t * t / ((2 * n + 2) * (2 * n + 3))
    return c, s


def _aux_cf(z):
    """(f, g) for z >= 1.6 via the Laplace continued fraction of erfcx."""
    w = (SQRT_PI / 2) * (1 - 1j) * z
    t = np.zeros_like(w)
    for n in range(_CF_DEPTH, 0, -1):
        t = (n / 2) / (w + t)
    v = (1 + 1j) / 2 / SQRT_PI / (w + t)
    return v.imag, v.real


def _aux_pos(z):
    z = np.asarray(z, dtype=float)
    f = np.empty_like(z)
    g = np.empty_like(z)
    small = z < _SERIES_MAX
    if small.any():
        zs = z[small]
        c, s = _fresnel_series(zs)
        th = (math.pi / 2) * zs * zs
        co, si = np.cos(th), np.sin(th)
        f[small] = (0.5 - s) * co - (0.5 - c) * si
        g[small] = (0.5 - c) * co + (0.5 - s) * si
    if (~small).any():
        f[~small], g[~small] = _aux_cf(z[~small])
    return f, g


def fresnel_aux(z):
    """Auxiliary functions ``(f(z), g(z))`` of the Fresnel integrals.

    ``g(z) = cos(pi z^2/2) (1/2 - C(z)) + sin(pi z^2/2) (1/2 - S(z))`` and
    ``f(z) = cos(pi z^2/2) (1/2 - S(z)) - sin(pi z^2/2) (1/2 - C(z))``,
    valid for all real z.  Both decay like ``1/z`` for z -> +inf and grow
    like ``cos, sin`` combinations for z -> -inf.
    """
    zz = np.asarray(z, dtype=float)
    a = np.abs(np.atleast_1d(zz))
    f, g = _aux_pos(a)
    neg = np.atleast_1d(zz) < 0
    if neg.any():
        th = (math.pi / 2) * a[neg] ** 2
        co, si = np.cos(th), np.sin(th)
        f[neg] = co - si - f[neg]
        g[neg] = co + si - g[neg]
    if zz.ndim == 0:
        return float(f[0]), float(g[0])
    return f.reshape(zz.shape), g.reshape(zz.shape)


def fresnel(x):
    """Fresnel integrals ``(C(x), S(x))`` with the ``pi t^2 / 2`` kernel."""
    xx = np.asarray(x, dtype=float)
    a = np.abs(np.atleast_1d(xx))
    c = np.empty_like(a)
    s = np.empty_like(a)
    small = a < _SERIES_MAX
    if small.any():
        c[small], s[small] = _fresnel_series(a[small])
    if (~small).any():
        big = a[~small]
        f, g = _aux_cf(big)
        th = (math.pi / 2) * big * big
        co, si = np.cos(th), np.sin(th)
        c[~small] = 0.5 + f * si - g * co
        s[~small] = 0.5 - f * co - g * si
    sgn = np.sign(np.atleast_1d(xx))
    c, s = sgn * c, sgn * s
    if xx.ndim == 0:
        return float(c[0]), float(s[0])
    return c.reshape(xx.shape), s.reshape(xx.shape)


# ---------------------------------------------------------------------------
# orthogonal polynomials

def hermite_he(n: int, x):
    """Probabilist's Hermite polynomial He_n(x) by three-term recurrence."""
    if n < 0:
        raise DomainError("hermite_he needs n >= 0")
    x = np.asarray(x, dtype=float)
    h0 = np.ones_like(x)
    if n == 0:
        return h0 if h0.ndim else float(h0)
    h1 = x.copy()
    for j in range(1, n):
        h0, h1 = h1, x * h1 - j * h0
    return h1 if h1.ndim else float(h1)


def laguerre_gen(n: int, a: float, x):
    """Generalized Laguerre polynomial L_n^(a)(x)."""
    if n < 0:
        raise DomainError("laguerre_gen needs n >= 0")
    x = np.asarray(x, dtype=float)
    l0 = np.ones_like(x)
    if n == 0:
        return l0 if l0.ndim else float(l0)
    l1 = 1.0 + a - x
    for k in range(1, n):
        l0, l1 = l1, ((2 * k + 1 + a - x) * l1 - (k + a) * l0) / (k + 1)
    return l1 if l1.ndim else float(l1)
