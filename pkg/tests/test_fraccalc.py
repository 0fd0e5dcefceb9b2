import math

import mpmath
import numpy as np
import pytest

from frdtm.fraccalc import (
    FracOrder,
    caputo_monomial,
    gamma_fn,
    gamma_ratio,
    ratio_standard,
    rl_integral_monomial,
    verify_theorem1,
)

ALPHAS = [0.25 * i for i in range(9)]  # 0, 0.25, ..., 2
GAMMAS = [0.5 * i for i in range(9)]  # 0, 0.5, ..., 4


class TestFracOrder:
    @pytest.mark.parametrize(
        "mu, ic, beta",
        [(0.5, 1, 0.5), (1.0, 1, 1.0), (1.5, 2, 0.75), (2.0, 2, 1.0), (1.25, 2, 0.625)],
    )
    def test_derived_fields(self, mu, ic, beta):
        o = FracOrder(mu)
        assert o.ic_count == ic
        assert o.beta == beta
        assert o.beta > 0

    @pytest.mark.parametrize("mu", [0.0, -1.0, 2.0001, float("nan")])
    def test_rejects_out_of_range(self, mu):
        with pytest.raises(ValueError):
            FracOrder(mu)

    def test_ceiling_at_integers_is_classical(self):
        assert FracOrder(1.0).m == 1
        assert FracOrder(2.0).m == 2
        assert FracOrder(1.01).m == 2


class TestGamma:
    def test_integer_arguments_are_factorials(self):
        assert gamma_fn(1) == 1.0
        assert gamma_fn(5) == 24.0
        assert gamma_fn(21) == float(math.factorial(20))

    def test_half(self):
        mpmath.mp.dps = 30
        expected = float(mpmath.sqrt(mpmath.pi))
        assert expected == pytest.approx(1.7724538509055160, rel=1e-16)
        assert gamma_fn(0.5) == pytest.approx(expected, rel=1e-15)
        # duplication formula at z = 1/2: Gamma(1/2) Gamma(1) = 2^0 sqrt(pi) Gamma(1)
        assert gamma_fn(0.5) * gamma_fn(1.0) == pytest.approx(math.sqrt(math.pi) * gamma_fn(1.0), rel=1e-15)

    @pytest.mark.parametrize("x", [0.1, 0.75, 1.25, 2.5, 7.3, 33.3, 100.5, 170.2])
    def test_matches_high_precision(self, x):
        mpmath.mp.dps = 40
        assert gamma_fn(x) == pytest.approx(float(mpmath.gamma(x)), rel=1e-13)

    @pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
    def test_domain(self, x):
        with pytest.raises(ValueError):
            gamma_fn(x)

    def test_ratio_survives_overflow(self):
        mpmath.mp.dps = 40
        r = gamma_ratio(200.5, 201.0)
        expected = float(mpmath.gamma(200.5) / mpmath.gamma(201.0))
        assert r == pytest.approx(expected, rel=1e-12)


class TestRatioStandard:
    def test_examples(self):
        assert ratio_standard(FracOrder(1.0), 0, 1) == 1.0
        assert ratio_standard(FracOrder(1.0), 3, 1) == 0.25
        assert ratio_standard(FracOrder(0.5), 0, 1) == pytest.approx(2.0 / math.sqrt(math.pi), rel=1e-15)
        assert ratio_standard(FracOrder(0.5), 0, 1) == pytest.approx(1.1283791670955126, rel=1e-15)

    @pytest.mark.parametrize("k", range(21))
    def test_classical_is_reciprocal_within_one_ulp(self, k):
        r = ratio_standard(FracOrder(1.0), k, 1)
        assert abs(r - 1.0 / (k + 1)) <= np.spacing(1.0 / (k + 1))

    def test_two_step(self):
        # beta = 1 (mu = 2): k!/(k+2)!
        assert ratio_standard(FracOrder(2.0), 2, 2) == pytest.approx(2.0 / 24.0, rel=1e-15)

    def test_large_k_is_finite(self):
        r = ratio_standard(FracOrder(1.0), 400, 1)
        assert r == pytest.approx(1.0 / 401, rel=1e-12)


class TestRLIntegral:
    def test_examples(self):
        assert rl_integral_monomial(1, 0) == (1.0, 1.0)
        assert rl_integral_monomial(0, 3.7) == (1.0, 3.7)
        c, e = rl_integral_monomial(0.5, 0.5)
        assert e == 1.0
        assert c == pytest.approx(math.gamma(1.5) / math.gamma(2.0), rel=1e-15)
        assert c == pytest.approx(0.8862269254527580, rel=1e-15)

    def test_divergent(self):
        with pytest.raises(ValueError):
            rl_integral_monomial(0.5, -1.0)

    @pytest.mark.parametrize("alpha", ALPHAS)
    def test_constant_rule(self, alpha):
        c, e = rl_integral_monomial(alpha, 0.0)
        assert e == alpha
        assert c == pytest.approx(1.0 / math.gamma(alpha + 1.0), rel=1e-13)

    def test_against_quadrature(self):
        # J^a t^g at t = 1 is (1/Gamma(a)) int_0^1 (1-s)^(a-1) s^g ds;
        # s = 1 - u^(1/a) removes the endpoint singularity
        mpmath.mp.dps = 30
        for a, g in [(0.5, 0.5), (1.5, 2.0), (0.25, 1.0)]:
            f = lambda u: (1 - u ** (1 / mpmath.mpf(a))) ** g  # noqa: E731
            quad = mpmath.quad(f, [0, 1]) / (a * mpmath.gamma(a))
            c, _ = rl_integral_monomial(a, g)
            assert c == pytest.approx(float(quad), rel=1e-12)

    @pytest.mark.parametrize("a", ALPHAS)
    @pytest.mark.parametrize("b", ALPHAS)
    def test_semigroup_lattice(self, a, b):
        for g in GAMMAS:
            c1, e1 = rl_integral_monomial(a, g)
            c2, e2 = rl_integral_monomial(b, e1)
            c12, e12 = rl_integral_monomial(a + b, g)
            assert e2 == pytest.approx(e12, abs=1e-12)
            assert c1 * c2 == pytest.approx(c12, abs=1e-12)


class TestCaputo:
    def test_examples(self):
        assert caputo_monomial(0.5, 0) is None
        assert caputo_monomial(1, 1) == (1.0, 0.0)
        c, e = caputo_monomial(0.5, 1)
        assert e == 0.5
        assert c == pytest.approx(1.1283791670955126, rel=1e-15)

    def test_second_order_kills_linear(self):
        assert caputo_monomial(1.5, 1) is None
        assert caputo_monomial(2.0, 1) is None
        assert caputo_monomial(2.0, 3) == (6.0, 1.0)

    def test_matches_gamma_closed_form(self):
        for alpha in (0.3, 0.5, 1.2, 1.7):
            for g in (2.0, 2.5, 3.0):
                c, e = caputo_monomial(alpha, g)
                assert e == pytest.approx(g - alpha)
                assert c == pytest.approx(math.gamma(g + 1) / math.gamma(g - alpha + 1), rel=1e-13)


class TestTheorem1:
    def test_examples(self):
        assert verify_theorem1(FracOrder(0.5), 2.0, 1e-12)
        assert verify_theorem1(FracOrder(1.0), 0.0, 1e-12)
        assert verify_theorem1(FracOrder(1.5), 1.0, 1e-12)

    @pytest.mark.parametrize("mu", ALPHAS[1:])
    def test_lattice(self, mu):
        order = FracOrder(mu)
        for g in GAMMAS:
            assert verify_theorem1(order, g, 1e-12), (mu, g)
