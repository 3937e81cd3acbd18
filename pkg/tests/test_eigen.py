import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from levyou import eigen as eg
from levyou.eigen import EigenFunction, LadderFunction, LadderIndex
from levyou.errors import DomainError
from levyou.evolve import stable_sf
from levyou.numerics import SampledFunction, integrate
from levyou.specfun import erf, hermite_he, laguerre_gen


class TestFourier:
    def test_examples(self):
        assert eg.phi_fourier(EigenFunction("+", 0, 1), 1.0) == pytest.approx(math.exp(-1), abs=1e-15)
        assert eg.phi_fourier(EigenFunction("even", -2, 2), 1.0) == pytest.approx(math.exp(-0.5), abs=1e-15)
        assert eg.phi_fourier(EigenFunction("-", 0, 1), -2.0) == pytest.approx(-1j * math.exp(-2), abs=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError, match="lam < 1"):
            eg.phi_fourier(EigenFunction("even", 1.5, 1.0), 1.0)
        with pytest.raises(DomainError):
            eg.phi_fourier(EigenFunction("even", 0.5, 1.0), 0.0)
        # mu = 2 has Fourier forms for lam >= 1
        assert eg.phi_fourier(EigenFunction("even", 1.5, 2.0), 1.0).real > 0

    @given(st.floats(0.2, 2.0), st.floats(-3, 0.95), st.floats(0.05, 6), st.sampled_from(["+", "-"]))
    def test_eigen_ode(self, mu, lam, k, par):
        ef = EigenFunction(par, lam, mu)
        h = 1e-5 * k
        d = (ef.fourier(k + h) - ef.fourier(k - h)) / (2 * h)
        phi = ef.fourier(k)
        res = -k * d - k ** mu * phi - lam * phi
        assert abs(res) <= 1e-6 * max(abs(phi), abs(k * d), 1e-300)

    @given(st.floats(0.2, 2.0), st.floats(-3, 0.9), st.floats(0.0, 2.0), st.floats(1e-6, 6),
           st.sampled_from([1.0, -1.0]))
    def test_fractional_shift(self, mu, lam, a, k, sgn):
        k *= sgn
        lhs = abs(k) ** a * EigenFunction("-", lam, mu).fourier(k)
        rhs = EigenFunction("-", lam - a, mu).fourier(k)
        assert abs(lhs - rhs) <= 1e-14 * max(abs(rhs), 1e-300)


class TestRealClosedForms:
    def test_gauss_examples(self):
        assert eg.phi_real_gauss("even", 0, 0.0) == pytest.approx(1 / math.sqrt(2 * math.pi), abs=1e-15)
        assert eg.phi_real_gauss("even", 0, 1.0) == pytest.approx(
            math.exp(-0.5) / math.sqrt(2 * math.pi), abs=1e-15)

    def test_gauss_half_against_inversion(self):
        num = eg.phi_real_numeric(EigenFunction("even", 0.5, 2.0), 2.0)
        assert abs(eg.phi_real_gauss("even", 0.5, 2.0) - num) < 1e-8

    def test_cauchy_examples(self):
        assert eg.phi_real_cauchy("even", 0, 0.0) == pytest.approx(1 / math.pi, abs=1e-15)
        assert eg.phi_real_cauchy("odd", 0, 1.0) == pytest.approx(1 / (2 * math.pi), abs=1e-15)
        assert abs(eg.phi_real_cauchy("even", -1, 1.0)) < 1e-16
        with pytest.raises(DomainError):
            eg.phi_real_cauchy("even", 1.0, 0.3)

    @given(st.floats(-4, 0.9), st.floats(-20, 20), st.sampled_from(["+", "-"]))
    def test_cauchy_rational_matches_trig(self, lam, x, par):
        n = -round(lam)
        if n < 0:
            return
        rational = eg.phi_real_cauchy(par, -n, x)
        nu = 1.0 + n
        trig = math.gamma(nu) / math.pi * (1 + x * x) ** (-nu / 2) * (
            math.cos(nu * math.atan(x)) if par == "+" else math.sin(nu * math.atan(x)))
        assert abs(rational - trig) < 1e-13

    def test_parity(self):
        x = np.linspace(0.1, 5, 9)
        for mu in (1.0, 2.0):
            for lam in (0.5, -0.3, -2.0):
                assert np.allclose(eg.phi_real_closed("+", lam, mu, -x), eg.phi_real_closed("+", lam, mu, x),
                                   rtol=0, atol=1e-15)
                assert np.allclose(eg.phi_real_closed("-", lam, mu, -x), -eg.phi_real_closed("-", lam, mu, x),
                                   rtol=0, atol=1e-15)


class TestNumeric:
    def test_cauchy(self):
        num = eg.phi_real_numeric(EigenFunction("even", 0, 1.0), 0.5)
        assert abs(num - eg.phi_real_cauchy("even", 0, 0.5)) < 1e-8

    def test_gauss_odd(self):
        num = eg.phi_real_numeric(EigenFunction("odd", -1, 2.0), 1.0)
        assert abs(num - eg.phi_real_gauss("odd", -1, 1.0)) < 1e-8

    def test_normalization_two_thirds(self):
        mu, L = 2 / 3, 40.0
        ef = EigenFunction("even", 0.0, mu)
        inner = integrate(lambda x: eg.phi_real_numeric(ef, x), (0.0, L), 1e-7,
                          points=[1.0, 5.0]).value
        # mass beyond |x| = L from the stable law with CF exp(-|k|^mu / mu)
        tail = stable_sf(mu, L * mu ** (1 / mu))
        assert abs(2 * (inner + tail) - 1.0) < 1e-4

    def test_rejects_large_lambda(self):
        with pytest.raises(DomainError):
            eg.phi_real_numeric(EigenFunction("even", 1.0, 0.5), 0.3)


class TestLadder:
    x = np.linspace(-20, 20, 4001)

    def test_raise_n_cauchy(self):
        f = LadderFunction.from_closed_form(1.0, LadderIndex(0, 0), "even", self.x)
        g = eg.ladder_apply("raise_n", f)
        assert g.index == LadderIndex(0, 1) and g.parity == "even"
        ref = eg.phi_real_cauchy("even", -1, self.x)
        assert np.max(np.abs(g.values - ref)) < 1e-6

    def test_raise_m_gauss(self):
        f = LadderFunction.from_closed_form(2.0, LadderIndex(0, 0), "even", self.x)
        g = eg.ladder_apply("raise_m", f)
        assert g.index == LadderIndex(1, 0) and g.parity == "odd"
        normal = np.exp(-self.x ** 2 / 2) / math.sqrt(2 * math.pi)
        assert np.max(np.abs(g.values - self.x * normal)) < 1e-6
        ref = eg.phi_real_gauss("odd", -1, self.x)
        mask = (np.abs(self.x) > 0.1) & (np.abs(self.x) < 6)
        ratio = g.values[mask] / ref[mask]
        assert np.ptp(ratio) < 1e-5 * abs(ratio.mean())

    def test_coarse_grid_rejected(self):
        x = np.linspace(-20, 20, 41)
        f = LadderFunction.from_closed_form(2.0, LadderIndex(0, 0), "even", x)
        with pytest.raises(DomainError, match="coarse"):
            eg.ladder_apply("raise_n", f)

    def test_bad_step(self):
        f = LadderFunction.from_closed_form(2.0, LadderIndex(0, 0), "even", self.x)
        with pytest.raises(DomainError):
            eg.ladder_apply("lower", f)

    def test_ladder_index(self):
        assert LadderIndex(1, 2).rate(2 / 3) == pytest.approx(1 + 4 / 3)
        assert LadderIndex(1, 0).eigenvalue(2.0) == -1
        with pytest.raises(DomainError):
            LadderIndex(-1, 0)


class TestRecurrence:
    def test_examples(self):
        assert abs(eg.recurrence_residual(0.0, 1.0, 0.0, "even")) < 1e-12
        assert abs(eg.recurrence_residual(0.5, 1.0, 1.3, "even")) < 1e-9
        assert abs(eg.recurrence_residual(-1.0, 2.0, 0.7, "odd")) < 1e-9

    @given(st.floats(-4, 0.99), st.floats(-8, 8), st.sampled_from([1.0, 2.0]), st.sampled_from(["+", "-"]))
    def test_random(self, lam, x, mu, par):
        assert abs(eg.recurrence_residual(lam, mu, x, par)) < 1e-9

    @given(st.floats(-3, 0.99), st.floats(-6, 6), st.sampled_from([1.0, 2.0]), st.sampled_from(["+", "-"]))
    def test_flip_shift(self, lam, x, mu, par):
        # d/dx phi^s_lam = -s phi^{-s}_{lam-1}
        h = 1e-4
        f = lambda v: eg.phi_real_closed(par, lam, mu, v)  # noqa: E731
        d = (8 * (f(x + h) - f(x - h)) - (f(x + 2 * h) - f(x - 2 * h))) / (12 * h)
        s = 1 if par == "+" else -1
        other = "-" if par == "+" else "+"
        assert abs(d + s * eg.phi_real_closed(other, lam - 1, mu, x)) < 1e-6

    def test_needs_closed_forms(self):
        with pytest.raises(DomainError):
            eg.recurrence_residual(0.0, 0.5, 1.0)


def _ratio_variance(a, b):
    r = a / b
    return float(np.var(r))


class TestHarmonic:
    x = np.linspace(-4.0, 4.0, 20)

    @pytest.mark.parametrize("n", range(4))
    def test_even_hermite(self, n):
        v = eg.phi_real_gauss("even", -2 * n, self.x)
        ref = hermite_he(2 * n, self.x) * np.exp(-self.x ** 2 / 2)
        assert _ratio_variance(v, ref) < 1e-16

    @pytest.mark.parametrize("n", range(4))
    def test_odd_hermite(self, n):
        v = eg.phi_real_gauss("odd", -(2 * n + 1), self.x)
        ref = hermite_he(2 * n + 1, self.x) * np.exp(-self.x ** 2 / 2)
        assert _ratio_variance(v, ref) < 1e-16

    @pytest.mark.parametrize("n", range(4))
    def test_laguerre_forms(self, n):
        z = -self.x ** 2 / 2
        ve = eg.phi_real_gauss("even", 2 * n + 1, self.x)
        assert _ratio_variance(ve, laguerre_gen(n, -0.5, z)) < 1e-16
        vo = eg.phi_real_gauss("odd", 2 * n + 2, self.x)
        assert _ratio_variance(vo, self.x * laguerre_gen(n, 0.5, z)) < 1e-16

    def test_lambda_one_pair(self):
        x = np.linspace(-3, 3, 13)
        assert np.ptp(eg.phi_real_gauss("even", 1.0, x)) == 0.0
        odd = eg.phi_real_gauss("odd", 1.0, x)
        assert _ratio_variance(odd[x != 0], erf(x[x != 0] / math.sqrt(2))) < 1e-20
        f = lambda v: eg.phi_real_gauss("odd", 1.0, v)  # noqa: E731
        h = 1e-3
        for v in (-1.3, 0.4, 2.2):
            lhs = (((v + h) * f(v + h) - (v - h) * f(v - h)) / (2 * h)
                   + (f(v + h) - 2 * f(v) + f(v - h)) / h ** 2)
            assert abs(lhs - f(v)) < 1e-6


class TestAsymptotics:
    def test_examples(self):
        assert eg.asymptotic_exponent(EigenFunction("even", 0.5, 2.0)) == -0.5
        assert eg.asymptotic_exponent(EigenFunction("even", -2, 2.0)) == eg.GAUSSIAN_LOCALIZED
        assert eg.is_gaussian_localized(EigenFunction("odd", -3, 2.0))
        assert not eg.is_gaussian_localized(EigenFunction("odd", -2, 2.0))

    @pytest.mark.parametrize("mu,lam,par", [(1.0, 0.0, "+"), (1.0, 0.0, "-"), (1.0, 0.5, "+"),
                                            (1.0, -1.0, "-"), (2.0, 0.5, "+"), (2.0, -0.5, "-")])
    def test_matches_measured_slope(self, mu, lam, par):
        ef = EigenFunction(par, lam, mu)
        x = np.array([2e3, 4e3]) if mu == 1.0 else np.array([40.0, 80.0])
        v = np.abs(eg.phi_real_closed(par, lam, mu, x))
        slope = math.log(v[1] / v[0]) / math.log(x[1] / x[0])
        assert slope == pytest.approx(eg.asymptotic_exponent(ef), abs=0.02)

    def test_cauchy_density_exponent(self):
        # documented resolution: the true tail power, not lam - 1
        assert eg.asymptotic_exponent(EigenFunction("even", 0.0, 1.0)) == -2.0
        assert eg.asymptotic_exponent(EigenFunction("odd", 0.0, 1.0)) == -1.0


class TestLift:
    x = np.linspace(-8, 8, 321)

    def test_odd_harmonic_to_hermite(self):
        p = SampledFunction(self.x, eg.phi_real_gauss("odd", -1, self.x))
        psi = eg.schroedinger_lift(p)
        ref = self.x * np.exp(-self.x ** 2 / 4)
        mask = self.x != 0
        assert _ratio_variance(psi.values[mask], ref[mask]) < 1e-16

    def test_ground_state(self):
        p = SampledFunction(self.x, eg.phi_real_gauss("even", 0, self.x))
        psi = eg.schroedinger_lift(p)
        assert _ratio_variance(psi.values, np.exp(-self.x ** 2 / 4)) < 1e-20

    def test_divergent_lift(self):
        p = SampledFunction(self.x, eg.phi_real_gauss("even", 0.5, self.x))
        psi = eg.schroedinger_lift(p)
        assert abs(psi(8.0)) > abs(psi(4.0))

    def test_overflow_truncated(self):
        x = np.linspace(-60, 60, 121)
        with pytest.warns(RuntimeWarning):
            psi = eg.schroedinger_lift(SampledFunction(x, np.exp(-x ** 2 / 2)))
        assert psi.x.min() > -60 and np.all(np.isfinite(psi.values))

    def test_potential(self):
        x = np.linspace(-5, 5, 11)
        assert np.allclose(eg.lift_potential(x), (x * x - 2) / 4, atol=1e-6)
        # psi_0 = exp(-x^2/4) solves psi'' = V psi at zero energy
        h = 1e-3
        psi = lambda v: np.exp(-v * v / 4)  # noqa: E731
        d2 = (psi(x + h) - 2 * psi(x) + psi(x - h)) / h ** 2
        assert np.allclose(d2, eg.lift_potential(x) * psi(x), atol=1e-6)

    def test_lifted_eigenfunction_equation(self):
        # lifted harmonic eigenfunctions satisfy psi'' = (V + lam) psi
        h = 1e-3
        for lam, par in ((-1.0, "odd"), (-2.0, "even")):
            psi = lambda v: eg.phi_real_gauss(par, lam, v) * np.exp(v * v / 4)  # noqa: E731
            x = np.linspace(-3, 3, 7) + 0.1
            d2 = (psi(x + h) - 2 * psi(x) + psi(x - h)) / h ** 2
            scale = np.max(np.abs(psi(x)))
            assert np.allclose(d2, (eg.lift_potential(x) + lam) * psi(x), atol=1e-5 * scale)
