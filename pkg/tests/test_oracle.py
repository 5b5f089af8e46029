import math
from dataclasses import replace

import numpy as np
import pytest

from entropy_pf.errors import ConfigError, OracleWindowError
from entropy_pf.model import BoundaryData, InitialCondition, ProblemSpec, SourceSpec
from entropy_pf.monotone import BaseBeta, Coefficient, MollifiedBeta
from entropy_pf.oracle import (
    OdeReduction,
    fine_explicit_reference,
    mollifier_quadrature_oracle,
    moser_phi_quadrature,
    moser_psi_series,
    rk4_reference,
)


def homogeneous(chi0=0.3, theta0=1.0, source=None, horizon=1.0):
    return ProblemSpec(
        n=8, horizon=horizon,
        source=source or SourceSpec("none"),
        theta0=InitialCondition("constant", (theta0,)),
        bc_left=BoundaryData(theta0), bc_right=BoundaryData(theta0),
        chi0=InitialCondition("constant", (chi0,)),
    )


class TestReduction:
    def test_rejects_nonconstant_data(self):
        with pytest.raises(ValueError):
            OdeReduction(ProblemSpec(n=8, chi0=InitialCondition("sine_bump", (0.0, 1.0))))
        with pytest.raises(ValueError):
            OdeReduction(homogeneous(source=SourceSpec("singular", R1=Coefficient(1.0, 0.5))))

    def test_initial_values(self):
        red = OdeReduction(homogeneous(0.3, 1.2))
        assert red.theta0 == 1.2 and red.chi0 == 0.3


class TestRK4:
    @pytest.mark.parametrize("chi0", [0.0, 1.0, 0.5])
    def test_equilibria(self, chi0):
        ref = rk4_reference(OdeReduction(homogeneous(chi0)), dt_ref=1e-3, record_every=10)
        np.testing.assert_allclose(ref.theta, 1.0, atol=1e-12)
        np.testing.assert_allclose(ref.chi, chi0, atol=1e-12)

    def test_first_integral(self):
        spec = homogeneous(0.3)
        ref = rk4_reference(OdeReduction(spec), dt_ref=1e-3, record_every=10)
        G = spec.potentials.G
        inv = ref.theta - G(ref.chi)
        assert np.max(np.abs(inv - inv[0])) <= 1e-10
        assert abs(ref.chi[-1] - ref.chi[0]) > 1e-2

    def test_fourth_order(self):
        spec = homogeneous(0.3, 1.2, SourceSpec("singular", R1=Coefficient(0.5)), horizon=0.5)
        red = OdeReduction(spec)
        exact = rk4_reference(red, dt_ref=1e-4, record_every=5000)
        errs = []
        for h in (0.05, 0.025, 0.0125):
            r = rk4_reference(red, dt_ref=h, record_every=1)
            errs.append(abs(r.theta[-1] - exact.theta[-1]) + abs(r.chi[-1] - exact.chi[-1]))
        orders = [math.log2(errs[k] / errs[k + 1]) for k in range(2)]
        assert min(orders) >= 3.8

    def test_window(self):
        spec = homogeneous(0.3, 1.0, SourceSpec("linear", R3=Coefficient(40.0)), horizon=1.0)
        with pytest.raises(OracleWindowError):
            rk4_reference(OdeReduction(spec), dt_ref=1e-3)

    def test_interpolation(self):
        ref = rk4_reference(OdeReduction(homogeneous(0.3)), dt_ref=1e-3, record_every=100)
        th, ch = ref.at(0.05)
        assert th == pytest.approx(0.5 * (ref.theta[0] + ref.theta[1]))
        assert ch == pytest.approx(0.5 * (ref.chi[0] + ref.chi[1]))


class TestFineExplicit:
    def test_guard(self):
        with pytest.raises(ConfigError):
            fine_explicit_reference(homogeneous(), 0.1, 1e-2, [0.1])

    def test_steady(self):
        out = fine_explicit_reference(homogeneous(0.0), 0.1, 1e-4, [0.0, 0.01])
        th, ch = out[0.01]
        np.testing.assert_allclose(th, 1.0, atol=1e-14)
        np.testing.assert_allclose(ch, 0.0, atol=1e-14)
        assert set(out) == {0.0, 0.01}

    def test_homogeneous_matches_rk4(self):
        base = homogeneous(0.3, horizon=0.05)
        ref = rk4_reference(OdeReduction(base), dt_ref=1e-5, record_every=1)
        d = BoundaryData.piecewise_linear(zip(ref.times, ref.theta))
        spec = replace(base, bc_left=d, bc_right=d)
        dt_ref = 1e-4
        th, ch = fine_explicit_reference(spec, 0.1, dt_ref, [0.05])[0.05]
        assert np.max(np.abs(th - ref.theta[-1])) <= 10 * dt_ref
        assert np.max(np.abs(ch - ref.chi[-1])) <= 10 * dt_ref


class TestQuadratureOracles:
    def test_mollifier_flat_zone(self):
        mb = MollifiedBeta(BaseBeta("singular", Coefficient(1.0)), 0.1)
        # far above the kink at 1/eps the mollified profile is the truncated constant
        assert mollifier_quadrature_oracle(mb, 0.0, 0.0, 20.0) == pytest.approx(1.0 - 0.01, abs=1e-13)
        assert mollifier_quadrature_oracle(mb, 0.0, 0.0, 0.001) == pytest.approx(1.0 - 100.0, abs=1e-10)

    def test_mollifier_matches_gauss(self):
        mb = MollifiedBeta(BaseBeta("singular", Coefficient(0.5)), 0.2)
        for r in (0.19, 0.2, 0.7, 1.0, 4.99, 5.0, 5.01):
            assert mollifier_quadrature_oracle(mb, 0.0, 0.0, r) == pytest.approx(float(mb.beta_eps(0.0, 0.0, r)), rel=1e-9, abs=1e-9)

    def test_moser_phi_quadrature(self):
        assert moser_phi_quadrature(1.0, 3, 2.0) == pytest.approx(4.0 / 3.0, abs=1e-12)
        assert moser_phi_quadrature(1.0, 3, 0.5) == 0.0

    def test_moser_psi_series(self):
        assert moser_psi_series(1.0, 3, 1.0, math.e) == pytest.approx(1.0, abs=1e-13)
        assert moser_psi_series(2.0, 3, 1.0, 1.5) == 0.0
