import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rswlab.blowup import (DIVERGENCE_LEVEL, comparison_ode_frozen, comparison_ode_thm11,
                           comparison_ode_thm33, composed_trajectory, predicted_blowup_bound,
                           thm11_rhs, trace_characteristic, z_dynamics_rhs)
from rswlab.errors import NoPredictionError, PreconditionError
from rswlab.fields import LagrangianState, make_bump_data, threshold_report
from rswlab.grid import make_grid
from rswlab.kernels import BoundConstants, GammaLaw, theta_flat, theta_sharp
from rswlab.solver import SolverConfig, run

LAW = GammaLaw(2.0)
SLOPE = 6.0 / math.sqrt(5.0) * 0.64


def consts(omega=1.0, z0=0.0, e0=0.1, m0=0.5, h0_min=1.0):
    return BoundConstants.build(omega, z0, e0, m0, h0_min)


def riccati(m0, t):
    """Exact solution of m' = -m^2/2."""
    return m0 / (1.0 + 0.5 * m0 * t)


class TestFrozenRiccati:
    def test_closed_form_to_minus_1e3(self):
        tr = comparison_ode_frozen(-1.0, 3.0, dt=1e-3)
        keep = tr.m_values >= -1e3
        exact = 2.0 / (tr.times[keep] - 2.0)
        assert np.max(np.abs(tr.m_values[keep] - exact)) <= 1e-6
        assert tr.divergence_time == pytest.approx(2.0, abs=1e-6)

    @settings(max_examples=20, deadline=None)
    @given(m0=st.floats(-5.0, -0.2))
    def test_relative_accuracy(self, m0):
        tr = comparison_ode_frozen(m0, -2.0 / m0 + 1.0, dt=1e-3)
        keep = tr.m_values >= -1e4
        rel = np.abs(tr.m_values[keep] / riccati(m0, tr.times[keep]) - 1.0)
        assert rel.max() <= 1e-8
        assert tr.divergence_time == pytest.approx(-2.0 / m0, abs=1e-6)

    def test_no_divergence_reported_when_short(self):
        tr = comparison_ode_frozen(-1.0, 1.0)
        assert tr.divergence_time is None and tr.times[-1] == pytest.approx(1.0)

    def test_strictly_decreasing(self):
        tr = comparison_ode_frozen(-1.0, 3.0)
        assert np.all(np.diff(tr.m_values) < 0)
        assert abs(tr.m_values[-1]) > DIVERGENCE_LEVEL


class TestThm11:
    def test_departs_threshold_downward(self):
        c = consts(omega=1.0, z0=0.5, m0=0.5, h0_min=0.8)
        m0 = -math.sqrt(2.0 * c.omega0_sharp)
        rhs0 = thm11_rhs(c, LAW)(0.0, m0)
        expected = -math.sqrt(theta_flat(0.0, c.h0_min, c.w0_sharp)) / (
            2.0 * theta_sharp(0.0, c.m0, LAW))
        assert rhs0 == pytest.approx(expected, rel=1e-12)
        tr = comparison_ode_thm11(c, LAW, m0, 50.0, dt=1e-3)
        assert tr.m_values[1] < tr.m_values[0]
        assert np.all(np.diff(tr.m_values) < 0)
        assert tr.divergence_time is not None

    def test_precondition(self):
        with pytest.raises(PreconditionError):
            comparison_ode_thm11(consts(), LAW, -1.3, 10.0)

    def test_divergence_monotone_in_m0(self):
        c = consts()
        t2 = comparison_ode_thm11(c, LAW, -2.0, 100.0).divergence_time
        t15 = comparison_ode_thm11(c, LAW, -1.5, 100.0).divergence_time
        assert t2 <= t15

    def test_slower_than_frozen_riccati(self):
        # sqrt(theta_flat) <= 1 and the bracket exceeds -m^2/2 + 1 - 1/2,
        # so the Riccati m' = -m^2/2 + 1/2 diverges first
        c = consts(omega=1.0, z0=0.0, h0_min=1.0)
        tr = comparison_ode_thm11(c, LAW, -2.0, 100.0)
        fr = comparison_ode_frozen(-2.0, 100.0, offset=0.5)
        assert fr.divergence_time < tr.divergence_time

    def test_stays_below_after_t1(self):
        c = consts()
        tr = comparison_ode_thm11(c, LAW, -1.6, 100.0)
        k = len(tr.m_values) // 3
        assert np.all(tr.m_values[k:] <= tr.m_values[k])

    def test_theta_cap_keeps_rhs_finite(self):
        c = consts(m0=50.0)
        assert math.isfinite(thm11_rhs(c, GammaLaw(1.0))(30.0, -2.0))


class TestThm33:
    def test_crossing_time_closed_form(self):
        c = consts(omega=1.0)
        tr = comparison_ode_thm33(c, LAW, -0.1, 30.0, dt=1e-3, h_star_value=1.0)
        expected = 2.0 * (1.0 / 0.1 - 1.0 / math.sqrt(2.0))
        assert tr.crossing_time == pytest.approx(expected, abs=1e-6)
        assert expected == pytest.approx(18.586, abs=1e-3)
        keep = tr.m_values >= -1e3
        np.testing.assert_allclose(tr.m_values[keep], riccati(-0.1, tr.times[keep]), rtol=1e-8)

    def test_boundary_rejected(self):
        c = consts(omega=1.0)
        hs = 2.0
        bar = -math.sqrt(2.0) * math.sqrt(1.0 - 1.0 / hs)
        with pytest.raises(PreconditionError):
            comparison_ode_thm33(c, LAW, bar, 10.0, h_star_value=hs)
        comparison_ode_thm33(c, LAW, bar - 1e-6, 10.0, h_star_value=hs)

    def test_crossing_decreasing_in_m0(self):
        c = consts(omega=1.0)
        m0s = np.linspace(-0.85, -1.4, 12)  # bar is -0.8165 for h* = 1.5
        ts = [comparison_ode_thm33(c, LAW, m, 200.0, h_star_value=1.5,
                                   stop_at_crossing=True).crossing_time for m in m0s]
        assert np.all(np.diff(ts) < 0)
        assert np.max(np.abs(np.diff(ts))) < 5.0

    def test_stop_at_crossing(self):
        c = consts(omega=1.0)
        tr = comparison_ode_thm33(c, LAW, -0.5, 100.0, h_star_value=1.0, stop_at_crossing=True)
        assert tr.divergence_time is None
        assert tr.m_values[-1] <= -math.sqrt(2.0) < tr.m_values[-2]


class TestPredictedBound:
    def grid(self):
        return make_grid(-8, 8, 512)

    def test_past_threshold_equals_thm11_leg(self):
        s = make_bump_data("velocity-bump", 1.6 / SLOPE, 1.0, self.grid())
        rep = threshold_report(s, LAW)
        assert rep.thm11_satisfied
        leg = comparison_ode_thm11(rep.constants, LAW, rep.inf_z0, 1e4, 1e-2)
        assert predicted_blowup_bound(s, LAW) == leg.divergence_time

    def test_monotone_in_amplitude(self):
        bounds = [predicted_blowup_bound(make_bump_data("velocity-bump", k / SLOPE, 1.0,
                                                        self.grid()), LAW)
                  for k in (1.45, 1.6, 1.8, 2.2, 3.0)]
        assert np.all(np.diff(bounds) <= 0)

    def test_small_gradient_leg_is_longer(self):
        g = make_grid(-12, 12, 1024)
        s = make_bump_data("velocity-bump", 1.3 / SLOPE, 1.0, g)
        rep = threshold_report(s, LAW)
        assert rep.thm12_satisfied
        b = predicted_blowup_bound(s, LAW)
        tr = composed_trajectory(s, LAW, b + 1.0, dt=1e-2)
        assert tr.crossing_time is not None and 0 < tr.crossing_time < b
        assert tr.divergence_time == pytest.approx(b, rel=1e-9)
        assert np.all(np.diff(tr.m_values) < 0)

    def test_no_prediction(self):
        s = make_bump_data("velocity-bump", 0.01, 1.0, self.grid())
        with pytest.raises(NoPredictionError):
            predicted_blowup_bound(s, LAW)

    def test_bound_exceeds_simulated_time(self):
        s = make_bump_data("velocity-bump", 1.8 / SLOPE, 1.0, make_grid(-8, 8, 1024))
        b = predicted_blowup_bound(s, LAW)
        out = run(s, LAW, SolverConfig(t_end=b, sample_interval=0.05))
        assert out.status == "blowup" and out.t_final <= b


def _constant_snapshots(n_t, dt, u=0.0, v=0.0, n=101):
    g = make_grid(-10, 10, n)
    return [LagrangianState.from_arrays(k * dt, g, np.ones(n), np.full(n, u), np.full(n, v))
            for k in range(n_t)]


class TestTrace:
    @pytest.mark.parametrize("family,sign", [(1, -1.0), (2, 1.0)])
    def test_constant_state(self, family, sign):
        tr = trace_characteristic(_constant_snapshots(41, 0.1), family, 0.5, LAW)
        np.testing.assert_allclose(tr.xi_positions, 0.5 + sign * tr.times, atol=1e-12)
        assert np.all(tr.z_along == 0.0) and tr.z_residual_max == 0.0
        assert not tr.truncated

    def test_oscillating_state(self):
        eps = 1e-3
        g = make_grid(-10, 10, 101)
        snaps = [LagrangianState.from_arrays(t, g, np.ones(101), np.full(101, eps * math.cos(t)),
                                             np.full(101, -eps * math.sin(t)))
                 for t in np.arange(0, 3, 0.1)]
        tr = trace_characteristic(snaps, 2, -1.0, LAW)
        assert np.max(np.abs(tr.z_along)) <= 1e-15 and tr.z_residual_max <= 1e-15

    def test_truncation(self):
        tr = trace_characteristic(_constant_snapshots(200, 0.1), 2, 0.0, LAW)
        assert tr.truncated
        assert tr.xi_positions[-1] <= 10 - 3 * 0.2

    def test_rejects_bad_family(self):
        with pytest.raises(ValueError):
            trace_characteristic(_constant_snapshots(3, 0.1), 3, 0.0, LAW)

    def test_z_rhs_constant_state(self):
        assert z_dynamics_rhs(0.0, 0.0, 0.0, 1.0, 1.0, LAW) == 0.0

    def test_residual_first_order_in_sample_interval(self):
        res = []
        for dt in (0.02, 0.01, 0.005):
            s0 = make_bump_data("velocity-bump", 0.2, 1.5, make_grid(-8, 8, 1024), exponent=5)
            out = run(s0, LAW, SolverConfig(t_end=2.0, sample_interval=dt, keep_snapshots=True))
            tr = trace_characteristic(out.snapshots, 1, 1.0, LAW)
            assert not tr.truncated
            assert np.all(np.diff(tr.xi_positions) < 0)
            res.append(tr.z_residual_max)
        for k in range(2):
            assert res[k] / res[k + 1] >= 1.8
