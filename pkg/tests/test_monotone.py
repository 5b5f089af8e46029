import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entropy_pf.errors import NumericFailure
from entropy_pf.monotone import BaseBeta, Coefficient, MollifiedBeta, RegularizedLog
from entropy_pf.oracle import mollifier_quadrature_oracle

# rho + 0.1 ln rho = 2, bisection on [1, 2] (200 halvings)
RHO_01_2 = 1.9340389465355945


def singular(R1=1.0, eps=0.01, **kw):
    return MollifiedBeta(BaseBeta("singular", Coefficient(R1)), eps, **kw)


class TestResolvent:
    def test_trivial_root(self):
        assert RegularizedLog(0.5).resolvent(1.0) == pytest.approx(1.0, abs=1e-12)

    def test_eps_one(self):
        assert RegularizedLog(1.0).resolvent(math.e + 1.0) == pytest.approx(math.e, rel=1e-12)

    def test_bisection_oracle(self):
        assert RegularizedLog(0.1).resolvent(2.0) == pytest.approx(RHO_01_2, abs=1e-12)

    @pytest.mark.parametrize("eps", [0.5, 1e-2, 1e-4])
    @pytest.mark.parametrize("r", [-3e-2, -5e-3, 0.0, 1e-8, 0.3, 1.0, 7.0, 1e6])
    def test_residual_tolerance(self, eps, r):
        # rho = exp(ln rho) is representable while r/eps > -700
        log = RegularizedLog(eps)
        rho = log.resolvent(r)
        assert rho > 0.0
        assert abs(rho + eps * math.log(rho) - r) <= 1e-12 * max(1.0, abs(r))

    @pytest.mark.parametrize("eps", [0.5, 1e-4])
    def test_log_resolvent_far_left(self, eps):
        log = RegularizedLog(eps)
        y = log.log_resolvent(-1e3)
        assert np.isfinite(y)
        assert abs(math.exp(y) + eps * y + 1e3) <= 1e-12 * 1e3
        assert log.ln_eps(-1e3) == y

    def test_vectorized_matches_scalar(self):
        log = RegularizedLog(0.05)
        r = np.linspace(-3, 30, 17)
        np.testing.assert_array_equal(log.resolvent(r), [log.resolvent(float(v)) for v in r])

    def test_iteration_cap(self):
        log = RegularizedLog(1e-3, resolvent_tol=1e-300, max_iter=2)
        with pytest.raises(NumericFailure) as exc:
            log.resolvent(7.3)
        assert exc.value.eps == 1e-3 and exc.value.r == 7.3
        assert exc.value.bracket is not None

    def test_eps_range(self):
        with pytest.raises(ValueError):
            RegularizedLog(0.0)
        with pytest.raises(ValueError):
            RegularizedLog(1.5)


class TestLnEps:
    @pytest.mark.parametrize("eps", [0.9, 0.1, 1e-3])
    def test_zero_at_one(self, eps):
        assert RegularizedLog(eps).ln_eps(1.0) == pytest.approx(0.0, abs=1e-13)

    def test_inverse_formula_point(self):
        assert RegularizedLog(0.5).ln_eps(math.e + 0.5) == pytest.approx(1.0, abs=1e-12)

    def test_sandwich_point(self):
        v = RegularizedLog(0.1).ln_eps(math.e**2)
        assert 2.0 / 1.1 <= v <= 2.0

    def test_Ln_definition(self):
        log = RegularizedLog(0.2)
        r = np.linspace(-2, 5, 9)
        np.testing.assert_allclose(log.Ln_eps(r), 0.2 * r + log.ln_eps(r), rtol=0, atol=1e-15)

    def test_derivative_examples(self):
        assert RegularizedLog(0.2).Ln_eps_prime(0.0) >= 1.0
        assert RegularizedLog(0.2).Ln_eps_prime(10.0) >= 1.0 / 20.0
        assert RegularizedLog(1e-3).ln_eps_prime(1.0) == pytest.approx(1.0 / 1.001, rel=1e-12)

    def test_derivative_matches_finite_difference(self):
        log = RegularizedLog(0.05)
        r = np.array([-2.0, 0.01, 0.7, 3.0, 40.0])
        h = 1e-6
        fd = (log.ln_eps(r + h) - log.ln_eps(r - h)) / (2 * h)
        np.testing.assert_allclose(log.ln_eps_prime(r), fd, rtol=1e-6)

    def test_and_prime_consistent(self):
        log = RegularizedLog(0.01)
        r = np.linspace(0.1, 4, 11)
        U, dU = log.Ln_eps_and_prime(r)
        np.testing.assert_allclose(U, log.Ln_eps(r), atol=1e-15)
        np.testing.assert_allclose(dU, log.Ln_eps_prime(r), atol=1e-15)

    def test_inverse_examples(self):
        assert RegularizedLog(0.5).ln_eps_inverse(0.0) == 1.0
        assert RegularizedLog(0.5).ln_eps_inverse(1.0) == pytest.approx(math.e + 0.5, rel=1e-15)
        assert RegularizedLog(0.25).ln_eps_inverse(-2.0) == pytest.approx(-0.364664, abs=1e-6)

    def test_window_bounds(self):
        assert RegularizedLog.window_bounds(0.5, 2.0) == (math.log(0.5), math.log(2.0))
        assert RegularizedLog.window_bounds(1.0, 1.0) == (0.0, 0.0)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(-10, 10), st.sampled_from([0.5, 0.1, 0.01, 1e-3]))
    def test_round_trip(self, s, eps):
        log = RegularizedLog(eps)
        assert abs(log.ln_eps(log.ln_eps_inverse(s)) - s) <= 10 * log.resolvent_tol * max(1.0, abs(s))

    @settings(max_examples=200, deadline=None)
    @given(st.floats(-50, 1e4), st.floats(-50, 1e4), st.sampled_from([0.3, 0.01, 1e-4]))
    def test_monotone_and_lipschitz(self, a, b, eps):
        log = RegularizedLog(eps)
        lo, hi = min(a, b), max(a, b)
        va, vb = log.ln_eps(lo), log.ln_eps(hi)
        assert va <= vb + 1e-12
        assert vb - va <= (hi - lo) / eps * (1 + 1e-9) + 1e-12


class TestCoefficient:
    def test_kinds(self):
        assert Coefficient(1.0).kind == "constant"
        assert Coefficient(1.0, 2.0).kind == "affine_x"
        assert Coefficient(1.0, 2.0, 1.0, 0.5).kind == "product"

    def test_bounds(self):
        c = Coefficient(0.5, 0.25, 1.0, 0.5)
        assert c.sup_abs(1.0, 1.0) == pytest.approx(0.75 * 1.5)
        assert c.inf(1.0, 1.0) == pytest.approx(0.5)
        assert c.lipschitz(1.0, 1.0) == pytest.approx(0.25 * 1.5 + 0.75 * 0.5)
        assert c.growth_constant(1.0, 1.0) == pytest.approx(0.25 / 0.5 + 0.5 / 1.0)

    def test_growth_infinite_when_vanishing(self):
        assert math.isinf(Coefficient(0.0, 1.0).growth_constant(1.0, 1.0))


class TestMollifiedBeta:
    def test_delta_exact(self):
        mb = MollifiedBeta(BaseBeta("singular", Coefficient(0.5, 0.25)), 0.1)
        L = 2 * 0.75 / 0.1**3 + 0.25 * (1 - 0.01)
        assert mb.L_eps == pytest.approx(L, rel=1e-15)
        assert mb.delta_eps == 0.1 / (1.0 + mb.L_eps)
        assert mb.analytic_error_bound < 1.0

    def test_zero_kind(self):
        mb = MollifiedBeta(BaseBeta("zero"), 0.01)
        r = np.linspace(-3, 300, 7)
        assert np.all(mb.beta_eps(0.2, 0.1, r) == 0.0)
        assert np.all(mb.beta_eps_prime(0.2, 0.1, r) == 0.0)
        assert np.all(mb.beta_eps_primitive(0.2, 0.1, r) == 0.0)
        assert mb.L_eps == 0.0 and mb.error_constant == 0.0

    def test_value_at_two(self):
        mb = singular()
        ref = mollifier_quadrature_oracle(mb, 0.5, 0.5, 2.0)
        assert mb.beta_eps(0.5, 0.5, 2.0) == pytest.approx(ref, abs=1e-10)
        assert abs(mb.beta_eps(0.5, 0.5, 2.0) - 0.75) <= mb.error_constant * mb.eps + 1e-10

    def test_derivative_at_two(self):
        assert singular().beta_eps_prime(0.5, 0.5, 2.0) == pytest.approx(0.25, abs=1e-10)

    def test_flat_zone(self):
        mb = singular()
        assert mb.beta_eps_prime(0.5, 0.5, 2.0 / mb.eps) == pytest.approx(0.0, abs=1e-12)
        assert mb.beta_eps(0.5, 0.5, 2.0 / mb.eps) == pytest.approx(1.0 - mb.eps**2, abs=1e-12)
        ref = mollifier_quadrature_oracle(mb, 0.5, 0.5, 2.0 / mb.eps)
        assert ref == pytest.approx(1.0 - mb.eps**2, abs=1e-12)

    @pytest.mark.parametrize("eps", [0.1, 0.01, 1e-3])
    def test_vanishes_near_one(self, eps):
        mb = singular(eps=eps)
        assert abs(mb.beta_eps(0.3, 0.3, 1.0)) <= mb.error_constant * eps
        assert abs(mollifier_quadrature_oracle(mb, 0.3, 0.3, 1.0)) <= mb.error_constant * eps

    def test_primitive(self):
        mb = singular()
        assert mb.beta_eps_primitive(0.5, 0.5, 1.0) == pytest.approx(0.0, abs=1e-14)
        assert abs(mb.beta_eps_primitive(0.5, 0.5, 2.0) - 0.5) <= mb.error_constant * mb.eps + 1e-10

    def test_primitive_derivative_is_beta(self):
        mb = singular(eps=0.1)
        r = np.array([0.05, 0.3, 1.7, 9.99, 12.0])
        h = 1e-6
        fd = (mb.beta_eps_primitive(0.2, 0.2, r + h) - mb.beta_eps_primitive(0.2, 0.2, r - h)) / (2 * h)
        np.testing.assert_allclose(fd, mb.beta_eps(0.2, 0.2, r), atol=1e-7)

    def test_prime_matches_finite_difference(self):
        mb = singular(eps=0.1)
        r = np.array([-1.0, 0.1, 0.2, 0.9, 3.0, 10.0, 20.0])
        h = 1e-7
        fd = (mb.beta_eps(0.2, 0.2, r + h) - mb.beta_eps(0.2, 0.2, r - h)) / (2 * h)
        # central differences resolve the kink layer (width delta ~ 5e-5) only to ~1e-6 relative
        np.testing.assert_allclose(mb.beta_eps_prime(0.2, 0.2, r), fd, rtol=1e-5, atol=1e-6)

    def test_equals_base_inside(self):
        mb = singular(eps=0.1)
        r = np.linspace(mb.eps + mb.delta_eps, 1 / mb.eps - mb.delta_eps, 50)
        np.testing.assert_allclose(mb.beta_eps(0.0, 0.0, r), 1.0 - 1.0 / r**2, atol=mb.error_constant * mb.eps)

    def test_truncated(self):
        mb = singular(eps=0.1)
        assert mb.truncated(0, 0, 0.01) == pytest.approx(1 - 100.0)
        assert mb.truncated(0, 0, 100.0) == pytest.approx(1 - 0.01)

    @pytest.mark.parametrize("eps", [1e-1, 1e-2, 1e-3])
    def test_near_kink_agreement(self, eps):
        mb = singular(eps=eps)
        for k in mb.kinks:
            for r in k + mb.delta_eps * np.array([-0.9, -0.3, 0.0, 0.4, 0.95]):
                assert mb.beta_eps(0, 0, r) == pytest.approx(mollifier_quadrature_oracle(mb, 0, 0, r), rel=1e-9, abs=1e-9)

    def test_M_stable_across_eps(self):
        Ms = [singular(eps=e).error_constant for e in (1e-1, 1e-2, 1e-3, 1e-4)]
        assert max(Ms) / min(Ms) < 1.1

    def test_validation(self):
        with pytest.raises(ValueError):
            singular(eps=1.0)
        with pytest.raises(ValueError):
            singular(quadrature_order=4)

    @settings(max_examples=300, deadline=None)
    @given(st.floats(-5, 2e3), st.floats(-5, 2e3), st.sampled_from([0.1, 0.01, 1e-3]))
    def test_monotone(self, a, b, eps):
        mb = singular(eps=eps)
        lo, hi = min(a, b), max(a, b)
        assert mb.beta_eps(0.4, 0.4, lo) <= mb.beta_eps(0.4, 0.4, hi) + 1e-12
        assert mb.beta_eps_prime(0.4, 0.4, lo) >= -1e-12


class TestBaseBeta:
    def test_vanishes_at_one(self):
        b = BaseBeta("singular", Coefficient(0.5, 0.25, 1.0, 0.5))
        x = np.linspace(0, 1, 5)
        assert np.all(b(x, 0.3, 1.0) == 0.0)

    def test_slope_bound(self):
        b = BaseBeta("singular", Coefficient(0.5, 0.25))
        r = np.geomspace(0.05, 20, 50)
        assert np.all(b.derivative(0.7, 0.0, r) <= b.slope_bound(r, 1.0, 1.0) + 1e-15)
        assert np.all(b.derivative(0.7, 0.0, r) >= 0.0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            BaseBeta("quadratic")
