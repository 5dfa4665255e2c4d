"""Grid stencils, initial data, conversions and snapshot diagnostics."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rswlab.errors import VacuumError
from rswlab.fields import (LagrangianState, RiemannState, alpha_sharp, bump_profile,
                           bump_profile_sq_integral, diagnose, from_riemann,
                           infimum_z, make_bump_data, potential_vorticity,
                           support_bounds, support_halfwidth, threshold_report,
                           to_riemann, total_energy, weighted_gradients)
from rswlab.grid import Field1D, d2dx2, ddx, make_grid, trapezoid
from rswlab.kernels import GammaLaw, energy_density, kappa, zeta

LAW = GammaLaw(2.0)
BP_MAX = 6.0 / math.sqrt(5.0) * 0.64  # max |d/ds (1-s^2)^3|, at s = 1/sqrt(5)


def const_state(grid, h=1.0, u=0.0, v=0.0):
    n = grid.n
    return LagrangianState.from_arrays(0.0, grid, np.full(n, h), np.full(n, u), np.full(n, v))


class TestGrid:
    def test_field_validation(self):
        with pytest.raises(ValueError):
            Field1D(0.0, 0.1, np.zeros(2))
        with pytest.raises(ValueError):
            Field1D(0.0, 0.0, np.zeros(5))
        with pytest.raises(ValueError):
            Field1D(0.0, 0.1, np.array([0.0, np.nan, 0.0]))

    def test_make_grid_endpoints(self):
        g = make_grid(-2.0, 3.0, 11)
        assert g.xi[0] == -2.0 and g.xi_max == pytest.approx(3.0)
        assert g.dxi == pytest.approx(0.5)

    def test_ddx_exact_on_cubics(self):
        g = make_grid(-1, 2, 31)
        x = g.xi
        f = x ** 3 - 2 * x
        # 4th-order interior and 2nd-order edges are exact for quadratics, interior for quartics
        np.testing.assert_allclose(ddx(f, g.dxi)[2:-2], 3 * x[2:-2] ** 2 - 2, atol=1e-12)
        np.testing.assert_allclose(ddx(x * x, g.dxi), 2 * x, atol=1e-12)

    def test_ddx_fourth_order(self):
        errs = []
        for n in (101, 201):
            g = make_grid(0, 1, n)
            errs.append(np.max(np.abs(ddx(np.sin(3 * g.xi), g.dxi)[2:-2]
                                      - 3 * np.cos(3 * g.xi[2:-2]))))
        assert errs[0] / errs[1] > 14

    def test_d2dx2(self):
        g = make_grid(0, 1, 201)
        x = g.xi
        err = np.max(np.abs(d2dx2(np.sin(2 * x), g.dxi) + 4 * np.sin(2 * x)))
        assert err < 1e-3
        np.testing.assert_allclose(d2dx2(x ** 3, g.dxi), 6 * x, atol=1e-9)

    def test_trapezoid(self):
        g = make_grid(0, math.pi, 2001)
        assert trapezoid(np.sin(g.xi), g.dxi) == pytest.approx(2.0, abs=1e-6)


class TestBumpData:
    def test_profile(self):
        assert bump_profile(0.0) == 1.0
        assert bump_profile(1.0) == 0.0
        assert bump_profile_sq_integral() == pytest.approx(
            np.trapezoid((1 - np.linspace(-1, 1, 200001) ** 2) ** 6, dx=2 / 200000), rel=1e-9)

    def test_zero_amplitude_is_constant_state(self):
        g = make_grid(-5, 5, 101)
        for kind in ("height-bump", "velocity-bump", "constant-pv"):
            s = make_bump_data(kind, 0.0, 1.0, g)
            h, u, v = s.arrays()
            assert np.all(h == 1.0) and np.all(u == 0.0) and np.all(v == 0.0)

    def test_velocity_bump_linear_in_amplitude(self):
        g = make_grid(-5, 5, 401)
        z1 = infimum_z(make_bump_data("velocity-bump", 0.2, 1.0, g), LAW)
        z2 = infimum_z(make_bump_data("velocity-bump", 0.4, 1.0, g), LAW)
        assert z2 == pytest.approx(2 * z1, rel=1e-12)
        assert z1 == pytest.approx(-0.2 * BP_MAX, rel=1e-3)

    def test_constant_pv_exact(self):
        g = make_grid(-10, 10, 513)
        s = make_bump_data("constant-pv", 0.3, 2.0, g)
        assert np.max(np.abs(potential_vorticity(s).values - 1.0)) <= 1e-12

    def test_rejections(self):
        g = make_grid(-5, 5, 101)
        with pytest.raises(VacuumError):
            make_bump_data("height-bump", -1.5, 1.0, g)
        with pytest.raises(VacuumError):
            make_bump_data("constant-pv", 2.0, 0.5, g)
        with pytest.raises(ValueError):
            make_bump_data("height-bump", 0.1, 4.5, g)
        with pytest.raises(ValueError):
            make_bump_data("nope", 0.1, 1.0, g)
        with pytest.raises(ValueError):
            make_bump_data("height-bump", 0.1, 1.0, g, exponent=1)


class TestRiemann:
    def test_constant_state(self):
        rs = to_riemann(const_state(make_grid(0, 1, 5)), LAW)
        for r in (rs.r1, rs.r2, rs.r3):
            assert np.all(r.values == 0.0)

    def test_closed_form_example(self):
        rs = to_riemann(const_state(make_grid(0, 1, 5), h=4.0, u=1.0), LAW)
        np.testing.assert_allclose(rs.r1.values, -1.0)
        np.testing.assert_allclose(rs.r2.values, 3.0)

    @settings(max_examples=30, deadline=None)
    @given(kind=st.sampled_from(["height-bump", "velocity-bump", "constant-pv"]),
           amp=st.floats(-0.4, 0.4), g=st.sampled_from([1.0, 1.4, 2.0, 3.0]))
    def test_roundtrip(self, kind, amp, g):
        law = GammaLaw(g)
        s = make_bump_data(kind, amp, 1.5, make_grid(-5, 5, 201))
        rs = to_riemann(s, law)
        np.testing.assert_allclose(rs.r2.values - rs.r1.values, 2 * kappa(s.h.values, law),
                                   atol=1e-12)
        back = from_riemann(rs, law)
        for a, b in zip(back.arrays(), s.arrays()):
            np.testing.assert_allclose(a, b, atol=1e-12, rtol=1e-12)

    def test_vacuum_detected(self):
        g = make_grid(0, 1, 5)
        # (R2 - R1)/2 = -3 lies below the gamma=2 vacuum value -2
        rs = RiemannState(0.0, g.with_values(np.full(5, 3.0)), g.with_values(np.full(5, -3.0)),
                          g.with_values(np.zeros(5)))
        with pytest.raises(VacuumError):
            from_riemann(rs, LAW)


class TestDiagnostics:
    def test_constant_state(self):
        s = const_state(make_grid(-1, 1, 21))
        z1, z2 = weighted_gradients(s, LAW)
        assert np.all(z1.values == 0) and np.all(z2.values == 0)
        assert np.all(potential_vorticity(s).values == 1.0)
        assert total_energy(s, LAW) == 0.0

    def test_pv_example(self):
        g = make_grid(0, 4, 41)
        s = LagrangianState.from_arrays(0.0, g, np.full(41, 2.0), np.zeros(41), 0.25 * g.xi)
        np.testing.assert_allclose(potential_vorticity(s).values, 0.75, atol=1e-13)

    def test_z_equals_du_when_h_is_one(self):
        g = make_grid(-5, 5, 801)
        s = make_bump_data("velocity-bump", 0.3, 2.0, g)
        z1, z2 = weighted_gradients(s, LAW)
        x = g.xi / 2.0
        exact = np.where(np.abs(x) < 1, 0.3 * 3 * (1 - x * x) ** 2 * (-2 * x) / 2.0, 0.0)
        np.testing.assert_allclose(z1.values, exact, atol=1e-5)
        np.testing.assert_array_equal(z1.values, z2.values)

    @pytest.mark.parametrize("g", [1.0, 2.0, 3.0])
    def test_height_gradient_identity(self, g):
        law = GammaLaw(g)
        grid = make_grid(-5, 5, 1601)
        s = make_bump_data("height-bump", 0.4, 2.0, grid)
        z1, z2 = weighted_gradients(s, law)
        dhg = ddx(s.h.values ** (g / 2), grid.dxi)
        np.testing.assert_allclose(np.abs(dhg), g / 4 * np.abs(z2.values - z1.values), atol=1e-6)

    def test_energy_of_velocity_bump(self):
        # 1/2 int u^2 = 1/2 a^2 w int (1-s^2)^6 ds
        errs = []
        for n in (401, 801):
            g = make_grid(-5, 5, n)
            s = make_bump_data("velocity-bump", 0.5, 2.0, g)
            exact = 0.5 * 0.25 * 2.0 * bump_profile_sq_integral()
            errs.append(abs(total_energy(s, LAW) - exact))
        assert errs[1] < 1e-6

    @settings(max_examples=25, deadline=None)
    @given(kind=st.sampled_from(["height-bump", "velocity-bump", "constant-pv"]),
           amp=st.floats(-0.5, 0.5))
    def test_energy_nonnegative(self, kind, amp):
        s = make_bump_data(kind, amp, 1.0, make_grid(-4, 4, 161))
        assert total_energy(s, LAW) >= 0

    def test_support(self):
        g = make_grid(-10, 10, 201)
        s = make_bump_data("height-bump", 0.1, 2.0, g)
        lo, hi = support_bounds(s)
        assert g.xi[lo] == pytest.approx(-1.9) and g.xi[hi] == pytest.approx(1.9)
        assert support_halfwidth(s) == pytest.approx(1.9)
        assert support_bounds(const_state(g)) is None

    def test_diagnose_record(self):
        g = make_grid(-5, 5, 201)
        s = make_bump_data("height-bump", 0.2, 1.0, g)
        rec = diagnose(s, LAW, potential_vorticity(s))
        assert rec.max_pv_drift == 0.0
        assert rec.max_h == pytest.approx(1.2) and rec.min_h == 1.0
        assert set(rec.as_dict()) >= {"t", "energy", "min_z", "support_halfwidth"}

    @pytest.mark.parametrize("g", [1.0, 2.0, 3.0])
    def test_pointwise_precursor_bound(self, g):
        # (h^(g/2) - 1)^2 <= Q(h) / zeta(alpha#)
        law = GammaLaw(g)
        s = make_bump_data("height-bump", 0.6, 2.0, make_grid(-5, 5, 401))
        a = alpha_sharp(s, law)
        h = s.h.values
        assert np.all((h ** (g / 2) - 1) ** 2 <= energy_density(h, law) / zeta(a, law) + 1e-14)


class TestThresholdReport:
    def test_constant_state(self):
        rep = threshold_report(const_state(make_grid(-5, 5, 101)), LAW)
        assert rep.thm11_threshold == pytest.approx(-math.sqrt(2))
        assert rep.energy_zero and rep.thm12_threshold == 0.0
        assert not rep.thm11_satisfied and not rep.thm12_satisfied

    def test_velocity_bump_threshold(self):
        s = make_bump_data("velocity-bump", 0.3, 1.0, make_grid(-5, 5, 401))
        rep = threshold_report(s, LAW)
        assert rep.constants.omega0_sharp == 1.0
        assert rep.thm11_threshold == pytest.approx(-math.sqrt(2))
        assert abs(rep.thm12_threshold) <= abs(rep.thm11_threshold)
        assert rep.h_star == pytest.approx(rep.alpha_bound + 1.0)

    def test_invalid_when_pv_not_positive(self):
        g = make_grid(0, 4, 41)
        s = LagrangianState.from_arrays(0.0, g, np.full(41, 1.0), np.zeros(41), -2.0 * g.xi)
        assert not threshold_report(s, LAW).valid

    def test_thm12_verdict_flips_by_bisection(self):
        # inf Z0 = -1.3 lies in the gap window; the verdict turns on as amplitude grows
        g = make_grid(-6, 6, 1024)

        def fires(k):
            s = make_bump_data("velocity-bump", k / BP_MAX, 1.0, g)
            return threshold_report(s, LAW).thm12_satisfied

        assert fires(1.3) and not fires(0.5)
        lo, hi = 0.5, 1.3
        for _ in range(30):
            mid = 0.5 * (lo + hi)
            lo, hi = (lo, mid) if fires(mid) else (mid, hi)
        assert 0.6 < hi < 1.3
        assert fires(hi) and not fires(lo)

    def test_thm11_monotone_in_amplitude(self):
        g = make_grid(-6, 6, 512)
        verdicts = [threshold_report(make_bump_data("velocity-bump", a, 1.0, g),
                                     LAW).thm11_satisfied for a in np.linspace(0.1, 1.5, 30)]
        first = verdicts.index(True)
        assert all(verdicts[first:])
