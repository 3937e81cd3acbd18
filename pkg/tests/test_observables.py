import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from levyou import evolve as ev
from levyou import observables as ob
from levyou.numerics import fit_rate

# Gaussian OU: sign(x) autocovariance is (2/pi) arcsin(e^-tau) at tau = 0.7
SIGN_GAUSS_07 = 0.330826050480895
# Cauchy stationary variance of cos(x/2): (1 + e^-1)/2 - e^-1
COS_HALF_CAUCHY_VAR = 0.316060279414278839


def real_space(u, mu):
    """Mean and variance of ``u`` under the stationary law by direct x-space quadrature.

    [-L, L] is cut into 2 pi panels (jumps sit on panel edges); beyond L the
    integrand is replaced by its period average times the exact tail mass,
    which leaves an O(1/L^2) error for the oscillating observables.
    """
    if mu == 1.0:
        f = lambda x: 1 / (math.pi * (1 + x * x))  # noqa: E731
        L, tail = 4000.0, 0.5 - math.atan(4000.0) / math.pi
    else:
        f = lambda x: math.exp(-x * x / 2) / math.sqrt(2 * math.pi)  # noqa: E731
        L, tail = 40.0, 0.0
    edges = np.unique(np.concatenate([np.arange(-L, L + 1, 2 * math.pi), [-L, -2, 0, 2, L]]))
    one = lambda x: float(u(np.array([x]))[0])  # noqa: E731

    def integral(g):
        s = sum(quad(lambda x: g(x) * f(x), a, b, epsabs=1e-14, epsrel=1e-13)[0]
                for a, b in zip(edges[:-1], edges[1:]))
        for side in (-1, 1):
            xs = side * (L + np.linspace(0, 4 * math.pi, 4001)[:-1])
            s += tail * np.mean([g(x) for x in xs])
        return s

    m = integral(one)
    return m, integral(lambda x: one(x) ** 2) - m * m


class TestBuiltins:
    def test_box_at_origin(self):
        assert ob.builtin_observable("box2").fourier(0.0) == pytest.approx(4.0, abs=1e-14)

    def test_cos_half_atoms(self):
        u = ob.builtin_observable("cos_half")
        assert sorted((a.location, a.weight) for a in u.atoms) == [(-0.5, math.pi), (0.5, math.pi)]

    def test_sign_against_shifted_cauchy(self):
        p = ev.StablePDFParams(1.0, 1.0).charfn()
        assert ob.expectation(ob.builtin_observable("sign"), p) == pytest.approx(0.5, abs=1e-8)

    @pytest.mark.parametrize("name", ob.BUILTIN_NAMES)
    def test_real_space_values(self, name):
        u = ob.builtin_observable(name)
        x = np.array([-3.0, -1.0, -0.25, 0.4, 1.5, 2.5])
        ref = {"cos_half": np.cos(x / 2), "sin_half": np.sin(x / 2), "sign": np.sign(x),
               "box2": (np.abs(x) < 2).astype(float),
               "signed_box2": np.sign(x) * (np.abs(x) < 2)}[name]
        assert np.max(np.abs(u(x) - ref)) < 1e-14

    @pytest.mark.parametrize("name", ob.BUILTIN_NAMES)
    def test_hermitian(self, name):
        u = ob.builtin_observable(name)
        k = np.linspace(0.05, 7, 11)
        if u.is_dirac_only:
            pytest.skip("no smooth part to sample")
        assert np.max(np.abs(u.fourier(-k) - np.conj(u.fourier(k)))) < 1e-14


class TestDelta:
    @pytest.mark.parametrize("name", ob.BUILTIN_NAMES)
    def test_stationary_start(self, name):
        u = ob.builtin_observable(name)
        for tau in (0.0, 0.8, 3.0):
            assert ob.delta_u(u, ev.stationary_charfn(2 / 3), 2 / 3, tau) < 1e-12

    def test_point_mass_closed_form(self):
        d = ob.delta_u(ob.builtin_observable("cos_half"), ev.point_mass(0.0), 2.0, 0.0)
        assert d == pytest.approx(1 - math.exp(-1 / 8), abs=1e-14)

    def test_rates_from_stable_start(self):
        p0 = ev.StablePDFParams(2 / 3, 1.0).charfn()
        taus = np.linspace(1, 4, 13)
        even = fit_rate(ob.delta_series(ob.builtin_observable("cos_half"), p0, 2.0, taus), (1, 4))
        odd = fit_rate(ob.delta_series(ob.builtin_observable("sin_half"), p0, 2.0, taus), (1, 4))
        assert abs(even.rate - 2 / 3) < 0.1
        assert abs(odd.rate - 1) < 0.1

    @settings(max_examples=30)
    @given(st.sampled_from(["sin_half", "sign", "signed_box2"]), st.floats(0.3, 2.0),
           st.floats(0.2, 2.0), st.floats(0.3, 3.0), st.floats(0.0, 4.0))
    def test_parity_selection(self, name, mu, alpha, scale, tau):
        p0 = ev.StablePDFParams(alpha, 0.0, scale).charfn()
        assert ob.delta_u(ob.builtin_observable(name), p0, mu, tau) < 1e-12


class TestSeries:
    def test_constant(self):
        s = ob.delta_series(ob.constant(1.0), ev.point_mass(1.0), 1.0, [0.0, 0.5, 2.0])
        assert np.all(s.values == 0.0)

    def test_monotone_and_closed_form(self):
        taus = np.linspace(0.0, 5.0, 26)
        s = ob.delta_series(ob.builtin_observable("cos_half"), ev.point_mass(1.0), 2.0, taus)
        assert len(s.values) == len(taus) == len(s.errors)
        assert np.all(np.diff(s.values) < 0)
        q = np.exp(-taus)
        ref = np.abs(np.cos(q / 2) * np.exp(-(1 - q * q) / 8) - math.exp(-1 / 8))
        assert np.max(np.abs(s.values - ref)) < 1e-13

    def test_corr_length(self):
        s = ob.corr_series(ob.builtin_observable("sin_half"), 1.0, [0.0, 0.3, 1.0, 2.0])
        assert len(s.taus) == 4 and s.meta["quantity"] == "corr"


class TestCorr:
    def test_long_time(self):
        assert abs(ob.corr_u(ob.builtin_observable("cos_half"), 1.0, 40.0)) < 1e-10

    def test_cauchy_cos_half(self):
        assert ob.corr_u(ob.builtin_observable("cos_half"), 1.0, 0.0) == pytest.approx(
            COS_HALF_CAUCHY_VAR, abs=1e-12)

    def test_sign_gauss(self):
        assert ob.corr_u(ob.builtin_observable("sign"), 2.0, 0.7) == pytest.approx(
            SIGN_GAUSS_07, abs=1e-7)

    @pytest.mark.parametrize("mu", [1.0, 2.0])
    @pytest.mark.parametrize("name", ob.BUILTIN_NAMES)
    def test_zero_lag_is_variance(self, name, mu):
        u = ob.builtin_observable(name)
        mean, var = real_space(u, mu)
        assert abs(ob.stationary_mean(u, mu) - mean) < 1e-6
        assert abs(ob.corr_u(u, mu, 0.0) - var) < 1e-6

    @pytest.mark.parametrize("name", ["cos_half", "sin_half", "box2", "signed_box2"])
    def test_cauchy_schwarz(self, name):
        u = ob.builtin_observable(name)
        for mu in (2 / 3, 1.0, 2.0):
            c0 = ob.corr_u(u, mu, 0.0)
            for tau in (0.1, 0.5, 1.5, 4.0):
                assert abs(ob.corr_u(u, mu, tau)) <= c0 + 1e-9

    def test_step_route_matches_gauss_oracle(self):
        # box2 at mu = 2: P(|x| < 2, |x'| < 2) - P(|x| < 2)^2 with (x, x') bivariate normal
        from scipy.stats import multivariate_normal
        tau = 0.6
        r = math.exp(-tau)
        mvn = multivariate_normal([0, 0], [[1, r], [r, 1]])
        inside = (mvn.cdf([2, 2]) - 2 * mvn.cdf([2, -2]) + mvn.cdf([-2, -2]))
        p = math.erf(2 / math.sqrt(2))
        assert ob.corr_u(ob.builtin_observable("box2"), 2.0, tau) == pytest.approx(
            inside - p * p, abs=1e-6)


@pytest.mark.slow
def test_two_thirds_rates():
    taus = np.linspace(3, 8, 11)
    rate = {n: fit_rate(ob.corr_series(ob.builtin_observable(n), 2 / 3, taus), (3, 8)).rate
            for n in ("cos_half", "box2", "sin_half", "sign")}
    assert abs(rate["cos_half"] - 2 / 3) < 0.05
    assert abs(rate["box2"] - 2 / 3) < 0.05
    assert abs(rate["sin_half"] - 1) < 0.1
    assert abs(rate["sign"] - 1) > 0.1
