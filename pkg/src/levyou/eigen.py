"""Eigenfunctions of the fractional Fokker-Planck operator of the Levy OU process.

Fourier space: the even and odd eigenfunctions with eigenvalue ``lam`` are
``|k|^-lam exp(-|k|^mu/mu)`` and ``i sign(k)`` times the same.  Real space uses
the inverse transform ``(1/2pi) int phi(k) e^{-ikx} dk``; closed forms exist
for ``mu = 2`` (Kummer functions) and ``mu = 1`` (rational/trigonometric),
anything else is evaluated by quadrature.

Prefactors are fixed so that the closed forms are exactly the inverse
transforms of the Fourier forms.  With that choice the ladder relations hold
with unit coefficients::

    d/dx phi^+_lam = -phi^-_{lam-1}        d/dx phi^-_lam = +phi^+_{lam-1}
    phi^s_{lam-mu} = (1 - lam) phi^s_lam - s x phi^{-s}_{lam-1}
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import specfun
from .errors import DomainError
from .numerics import SampledFunction, integrate

EVEN, ODD = "even", "odd"
_PARITY_ALIASES = {"even": EVEN, "+": EVEN, "+1": EVEN, "odd": ODD, "-": ODD, "-1": ODD}

GAUSSIAN_LOCALIZED = -math.inf


def parse_parity(parity) -> str:
    if isinstance(parity, (int, np.integer)) and parity in (1, -1):
        return EVEN if parity == 1 else ODD
    try:
        return _PARITY_ALIASES[str(parity).strip().lower()]
    except KeyError:
        raise DomainError(f"parity must be 'even' or 'odd', got {parity!r}") from None


def _sign(parity: str) -> int:
    return 1 if parity == EVEN else -1


def _flip(parity: str) -> str:
    return ODD if parity == EVEN else EVEN


def _check_mu(mu: float):
    if not 0 < mu <= 2:
        raise DomainError(f"stability exponent mu must lie in (0, 2], got {mu!r}")


@dataclass(frozen=True)
class EigenFunction:
    parity: str
    lam: float
    mu: float

    def __post_init__(self):
        object.__setattr__(self, "parity", parse_parity(self.parity))
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "mu", float(self.mu))
        _check_mu(self.mu)

    @property
    def sign(self) -> int:
        return _sign(self.parity)

    def fourier(self, k):
        return phi_fourier(self, k)

    def real(self, x):
        """Real-space value: closed form for mu in {1, 2}, quadrature otherwise."""
        if self.mu == 2.0:
            return phi_real_gauss(self.parity, self.lam, x)
        if self.mu == 1.0:
            return phi_real_cauchy(self.parity, self.lam, x)
        return phi_real_numeric(self, x)


@dataclass(frozen=True)
class LadderIndex:
    m: int
    n: int

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise DomainError("ladder indices must be non-negative")

    def rate(self, mu: float) -> float:
        return self.m + mu * self.n

    def eigenvalue(self, mu: float) -> float:
        return -(self.m + mu * self.n)


# ---------------------------------------------------------------------------
# Fourier space

def phi_fourier(ef: EigenFunction, k):
    """Fourier-space eigenfunction at wave number(s) ``k`` (complex)."""
    if ef.lam >= 1 and ef.mu != 2.0:
        raise DomainError(
            f"eigenvalue lam={ef.lam} >= 1 has no Fourier-space eigenfunction for mu < 2: "
            "|k|^-lam is not integrable at k=0 (lam < 1 required)")
    k = np.asarray(k, dtype=float)
    ak = np.abs(k)
    if ef.lam > 0 and np.any(ak == 0):
        raise DomainError(f"phi_fourier undefined at k=0 for lam={ef.lam} > 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        mag = np.where(ak == 0, 1.0 if ef.lam == 0 else 0.0, ak ** (-ef.lam))
    mag = mag * np.exp(-ak ** ef.mu / ef.mu)
    out = np.asarray(mag.astype(complex) if ef.parity == EVEN else 1j * np.sign(k) * mag)
    return complex(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# real space, closed forms

def _gauss_even(lam, x):
    a = 0.5 * (1.0 - lam)
    z = -0.5 * x * x
    if specfun._is_nonpos_int(a):
        return specfun.kummer_m(a, 0.5, z)
    pref = 2.0 ** a * specfun.gamma(a) / (2 * math.pi)
    return pref * specfun.kummer_m(a, 0.5, z)


def _gauss_odd(lam, x):
    a = 1.0 - 0.5 * lam
    z = -0.5 * x * x
    if specfun._is_nonpos_int(a):
        return x * specfun.kummer_m(a, 1.5, z)
    pref = 2.0 ** a * specfun.gamma(a) / (2 * math.pi)
    return pref * x * specfun.kummer_m(a, 1.5, z)


def phi_real_gauss(parity, lam: float, x):
    """Real-space eigenfunction of the Gaussian OU operator (mu = 2).

    even: ``2^a Gamma(a)/(2 pi) M(a, 1/2, -x^2/2)``, ``a = (1-lam)/2``
    odd:  ``2^a Gamma(a)/(2 pi) x M(a, 3/2, -x^2/2)``, ``a = 1 - lam/2``

    Where ``Gamma(a)`` has a pole (even ``lam = 2n+1``, odd ``lam = 2n+2``) the
    prefactor is dropped and the terminating polynomial itself is returned,
    i.e. ``M(-n, 1/2, -x^2/2)`` resp. ``x M(-n, 3/2, -x^2/2)``, proportional to
    ``L_n^(-1/2)(-x^2/2)`` resp. ``x L_n^(1/2)(-x^2/2)``.
    """
    parity = parse_parity(parity)
    x = np.asarray(x, dtype=float)
    out = _gauss_even(float(lam), x) if parity == EVEN else _gauss_odd(float(lam), x)
    return float(out) if np.ndim(out) == 0 else out


def phi_real_cauchy(parity, lam: float, x):
    """Real-space eigenfunction of the Cauchy OU operator (mu = 1).

    ``Gamma(1-lam)/pi (1+x^2)^{-(1-lam)/2}`` times ``cos`` (even) or ``sin``
    (odd) of ``(1-lam) arctan x``; rational form for ``lam = -n``.
    """
    parity = parse_parity(parity)
    lam = float(lam)
    if lam >= 1:
        raise DomainError(f"Cauchy eigenfunctions need lam < 1, got {lam}")
    x = np.asarray(x, dtype=float)
    if lam <= 0 and lam.is_integer():
        n = int(-lam)
        w = (1 - 1j * x) ** (n + 1)
        scale = math.factorial(n) / math.pi / (1 + x * x) ** (n + 1)
        out = scale * (w.real if parity == EVEN else -w.imag)
    else:
        nu = 1.0 - lam
        env = specfun.gamma(nu) / math.pi * (1 + x * x) ** (-nu / 2)
        ang = nu * np.arctan(x)
        out = env * (np.cos(ang) if parity == EVEN else np.sin(ang))
    return float(out) if np.ndim(out) == 0 else out


def phi_real_closed(parity, lam: float, mu: float, x):
    if mu == 2.0:
        return phi_real_gauss(parity, lam, x)
    if mu == 1.0:
        return phi_real_cauchy(parity, lam, x)
    raise DomainError(f"closed forms exist only for mu in {{1, 2}}, got {mu}")


# ---------------------------------------------------------------------------
# real space, quadrature

def _numeric_point(ef: EigenFunction, x: float, tol: float) -> float:
    lam, mu = ef.lam, ef.mu
    env = lambda k: np.exp(-k ** mu / mu)  # noqa: E731
    sgn = 1.0
    if ef.parity == ODD:
        if x == 0.0:
            return 0.0
        if x < 0:
            sgn, x = -1.0, -x
    trig = np.cos if ef.parity == EVEN else np.sin
    # [0, 1]: algebraic weight carries the k^-lam endpoint behaviour
    head = integrate(lambda k: env(k) * trig(k * x), (0.0, 1.0), tol / 2,
                     weight="alg", wvar=(-lam, 0.0)).value
    tail_f = lambda k: k ** (-lam) * env(k)  # noqa: E731
    if x == 0.0:
        tail = integrate(tail_f, (1.0, math.inf), tol / 2).value
    else:
        tail = integrate(tail_f, (1.0, math.inf), tol / 2,
                         weight="cos" if ef.parity == EVEN else "sin", wvar=x).value
    return sgn * (head + tail) / math.pi


def phi_real_numeric(ef: EigenFunction, x, tol: float = 1e-11):
    """Inverse Fourier transform of the eigenfunction by cosine/sine quadrature."""
    if ef.lam >= 1:
        raise DomainError(f"quadrature inversion needs lam < 1, got {ef.lam}")
    xs = np.asarray(x, dtype=float)
    vals = np.array([_numeric_point(ef, float(v), tol) for v in xs.ravel()])
    return float(vals[0]) if xs.ndim == 0 else vals.reshape(xs.shape)


# ---------------------------------------------------------------------------
# ladder operators on sampled functions

@dataclass(frozen=True, eq=False)
class LadderFunction:
    """Sampled real-space eigenfunction with its ladder bookkeeping."""

    sampled: SampledFunction
    mu: float
    index: LadderIndex
    parity: str

    def __post_init__(self):
        object.__setattr__(self, "parity", parse_parity(self.parity))

    @property
    def x(self):
        return self.sampled.x

    @property
    def values(self):
        return self.sampled.values

    @property
    def lam(self) -> float:
        return self.index.eigenvalue(self.mu)

    @classmethod
    def from_closed_form(cls, mu: float, index: LadderIndex, parity, x) -> "LadderFunction":
        x = np.asarray(x, dtype=float)
        vals = phi_real_closed(parity, index.eigenvalue(mu), mu, x)
        return cls(SampledFunction(x, vals), mu, index, parity)


def _d4(values, h):
    d = np.empty_like(values)
    d[2:-2] = (values[:-4] - 8 * values[1:-3] + 8 * values[3:-1] - values[4:]) / (12 * h)
    d[:2] = np.gradient(values[:3], h, edge_order=2)[:2]
    d[-2:] = np.gradient(values[-3:], h, edge_order=2)[-2:]
    return d


def sampled_derivative(f: SampledFunction, tol: float = 1e-6):
    """Fourth-order central differences on a uniform grid.

    The discretization error is estimated by Richardson comparison with the
    stencil at twice the step; if it exceeds ``tol`` relative to the largest
    derivative value the grid is rejected as too coarse.
    """
    if not f.is_uniform():
        raise DomainError("derivatives need a uniform x-grid")
    if f.x.size < 9:
        raise DomainError("need at least 9 grid points for differentiation")
    h = f.x[1] - f.x[0]
    v = f.values
    d = _d4(v, h)
    coarse = (v[:-8] - 8 * v[2:-6] + 8 * v[6:-2] - v[8:]) / (24 * h)
    est = np.max(np.abs(d[4:-4] - coarse)) / 15.0
    scale = max(np.max(np.abs(d)), np.finfo(float).tiny)
    if est > tol * scale:
        raise DomainError(f"x-grid too coarse for differentiation: estimated relative error "
                          f"{est / scale:.2e} > {tol:.1e}; refine the grid")
    return d


def ladder_apply(which: str, f: LadderFunction, tol: float = 1e-6) -> LadderFunction:
    """Move along the eigenvalue ladder ``lam_mn = -(m + mu n)``.

    ``raise_n``: ``[(m + 1 + mu n) + x d/dx] f`` maps ``(m, n) -> (m, n+1)``
    keeping parity.  ``raise_m``: ``-s df/dx`` (``s`` the parity sign of ``f``)
    maps ``(m, n) -> (m+1, n)`` and flips parity.
    """
    d = sampled_derivative(f.sampled, tol)
    idx = f.index
    if which == "raise_n":
        vals = (1.0 - f.lam) * f.values + f.x * d
        return LadderFunction(SampledFunction(f.x, vals), f.mu, LadderIndex(idx.m, idx.n + 1),
                              f.parity)
    if which == "raise_m":
        vals = -_sign(f.parity) * d
        return LadderFunction(SampledFunction(f.x, vals), f.mu, LadderIndex(idx.m + 1, idx.n),
                              _flip(f.parity))
    raise DomainError(f"unknown ladder step {which!r}; use 'raise_n' or 'raise_m'")


def recurrence_residual(lam: float, mu: float, x, parity=EVEN):
    """``phi^s_{lam-mu} - [(1-lam) phi^s_lam - s x phi^{-s}_{lam-1}]`` from closed forms."""
    parity = parse_parity(parity)
    if mu not in (1.0, 2.0):
        raise DomainError("recurrence residual needs closed forms (mu = 1 or 2)")
    if mu == 1.0 and not lam < 1:
        raise DomainError(f"lam={lam} violates lam < 1 for mu = 1")
    s = _sign(parity)
    x = np.asarray(x, dtype=float)
    lhs = phi_real_closed(parity, lam - mu, mu, x)
    rhs = (1 - lam) * phi_real_closed(parity, lam, mu, x) \
        - s * x * phi_real_closed(_flip(parity), lam - 1, mu, x)
    return lhs - rhs


# ---------------------------------------------------------------------------
# asymptotics and the Schroedinger lift

def is_gaussian_localized(ef: EigenFunction) -> bool:
    """Harmonic-spectrum eigenfunctions of the Gaussian OU operator."""
    if ef.mu != 2.0 or not ef.lam.is_integer() or ef.lam > 0:
        return False
    n = int(-ef.lam)
    return (n % 2 == 0) == (ef.parity == EVEN)


def asymptotic_exponent(ef: EigenFunction) -> float:
    """Power ``p`` in ``phi(x) ~ |x|^p`` for ``|x| -> inf``.

    The tail is set by the leading term of the small-k expansion
    ``sum_j (-1/mu)^j/j! |k|^(mu j - lam)`` that is not smooth at k = 0 (for
    the given parity); its transform decays as ``|x|^(lam - mu j - 1)``.  For
    ``mu = 2`` this is ``lam - 1``.  Gaussian-localized eigenfunctions return
    ``GAUSSIAN_LOCALIZED`` (``-inf``).
    """
    if ef.lam >= 1 and ef.mu != 2.0:
        raise DomainError(f"no eigenfunction for lam={ef.lam} >= 1 with mu < 2")
    if is_gaussian_localized(ef):
        return GAUSSIAN_LOCALIZED
    if ef.mu == 2.0:
        return ef.lam - 1.0
    want = 0 if ef.parity == EVEN else 1
    for j in range(200):
        beta = ef.mu * j - ef.lam
        smooth = beta >= 0 and float(beta).is_integer() and int(beta) % 2 == want
        if not smooth:
            return ef.lam - ef.mu * j - 1.0
    return GAUSSIAN_LOCALIZED


def schroedinger_lift(p: Union[SampledFunction, LadderFunction], max_exponent: float = 700.0):
    """Divide by the oscillator ground state ``exp(-x^2/4)``.

    Points where ``x^2/4`` exceeds ``max_exponent`` would overflow; they are
    dropped with a warning.
    """
    s = p.sampled if isinstance(p, LadderFunction) else p
    keep = s.x * s.x / 4 <= max_exponent
    if not keep.all():
        warnings.warn(f"schroedinger_lift: dropped {np.count_nonzero(~keep)} points "
                      f"where exp(x^2/4) overflows", RuntimeWarning, stacklevel=2)
    x = s.x[keep]
    return SampledFunction(x, s.values[keep] * np.exp(x * x / 4), label="lifted")


def lift_potential(x, U=lambda x: 0.5 * x * x, h: float = 1e-4):
    """Potential ``V - eps_0`` of the lifted problem, ``U'^2/4 - U''/2``.

    Writing ``p = exp(-U/2) psi`` turns ``(U' p)' + p'' = lam p`` into
    ``psi'' = (V - eps_0 - lam) psi`` with this potential; for ``U = x^2/2``
    it is ``(x^2 - 2)/4`` and ``exp(-x^2/4)`` is the zero-energy ground state.
    Derivatives of ``U`` by central differences.
    """
    x = np.asarray(x, dtype=float)
    du = (U(x + h) - U(x - h)) / (2 * h)
    d2u = (U(x + h) - 2 * U(x) + U(x - h)) / (h * h)
    return 0.25 * du * du - 0.5 * d2u
