"""Comparison ODEs, blow-up time bounds and characteristic tracing."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import NoPredictionError, PreconditionError
from .fields import (LagrangianState, potential_vorticity, threshold_report,
                     weighted_gradients)
from .kernels import (BoundConstants, GammaLaw, PRINTED_CUBE_CONSTANT,
                      f_gamma_inv, theta_flat)

DIVERGENCE_LEVEL = 1e8
THETA_SHARP_CAP = 1e12


@dataclass
class ComparisonTrajectory:
    kind: str
    times: np.ndarray
    m_values: np.ndarray
    divergence_time: float | None = None
    crossing_time: float | None = None

    def m_at(self, t) -> np.ndarray:
        """Linear interpolation of the trajectory (NaN past its end)."""
        return np.interp(t, self.times, self.m_values, right=np.nan)


@dataclass
class CharacteristicTrace:
    family: int
    times: np.ndarray
    xi_positions: np.ndarray
    z_along: np.ndarray
    z_residual_max: float
    truncated: bool = False
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _integrate(rhs: Callable[[float, float], float], t0: float, m0: float,
               t_end: float, dt: float, stop: Callable[[float], bool] | None = None):
    """Scalar RK4 with step dt/(1+|m|); stops at |m| > 1e8, t_end or ``stop(m)``."""
    ts = [t0]
    ms = [m0]
    t, m = t0, m0
    diverged = None
    while t < t_end:
        h = min(dt / (1.0 + abs(m)), t_end - t)
        k1 = rhs(t, m)
        k2 = rhs(t + 0.5 * h, m + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, m + 0.5 * h * k2)
        k4 = rhs(t + h, m + h * k3)
        m = m + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t + h
        ts.append(t)
        ms.append(m)
        if not math.isfinite(m) or abs(m) > DIVERGENCE_LEVEL:
            diverged = t
            break
        if stop is not None and stop(m):
            break
    return np.array(ts), np.array(ms), diverged


def comparison_ode_frozen(m_init: float, t_end: float, dt: float = 1e-3,
                          rate: float = 1.0, offset: float = 0.0) -> ComparisonTrajectory:
    """m' = rate * (-m^2/2 + offset); the constant-coefficient Riccati oracle."""
    ts, ms, div = _integrate(lambda t, m: rate * (-0.5 * m * m + offset),
                             0.0, m_init, t_end, dt)
    return ComparisonTrajectory("frozen-riccati", ts, ms, div)


def _log_theta_sharp(t: float, m0: float, law: GammaLaw) -> float:
    z = m0 * math.exp(t)
    if law.gamma == 1.0:
        return z
    return 2.0 / (law.gamma - 1.0) * math.log1p(0.5 * (law.gamma - 1.0) * z)


def thm11_rhs(constants: BoundConstants, law: GammaLaw) -> Callable[[float, float], float]:
    """Right side sqrt(theta_flat) [-m^2/2 + omega0# - 1/(2 theta_sharp)]."""
    om = constants.omega0_sharp
    log_cap = math.log(THETA_SHARP_CAP)
    theta_flat(0.0, constants.h0_min, constants.w0_sharp)  # validates h0_min
    inv_root = 1.0 / math.sqrt(constants.h0_min)
    half_w = 0.5 * constants.w0_sharp

    def rhs(t, m):
        sq_flat = 1.0 / (inv_root + half_w * t)
        lt = _log_theta_sharp(t, constants.m0, law)
        # dropping a decaying positive-sign term only makes m fall faster
        inv = 0.0 if lt > log_cap else 0.5 * math.exp(-lt)
        return sq_flat * (-0.5 * m * m + om - inv)

    return rhs


def comparison_ode_thm11(constants: BoundConstants, law: GammaLaw, m_init: float,
                         t_end: float, dt: float = 1e-3,
                         t_start: float = 0.0) -> ComparisonTrajectory:
    """Integrate the large-gradient comparison ODE from ``m(t_start) = m_init``.

    Requires ``m_init <= -sqrt(2 omega0#)``.
    """
    thr = -math.sqrt(2.0 * constants.omega0_sharp)
    if m_init > thr * (1.0 - 1e-12):
        raise PreconditionError(
            f"m(0) = {m_init} is above the threshold {thr}; decrease not guaranteed")
    ts, ms, div = _integrate(thm11_rhs(constants, law), t_start, m_init, t_end, dt)
    return ComparisonTrajectory("thm11", ts, ms, div)


def h_star(constants: BoundConstants, law: GammaLaw,
           bound_constant: float = PRINTED_CUBE_CONSTANT) -> float:
    alpha = f_gamma_inv(constants.g0 * constants.e0, law, bound_constant=bound_constant)
    return (alpha + 1.0) ** (2.0 / law.gamma)


def comparison_ode_thm33(constants: BoundConstants, law: GammaLaw, m0: float,
                         t_end: float, dt: float = 1e-3, h_star_value: float | None = None,
                         stop_at_crossing: bool = False) -> ComparisonTrajectory:
    """Integrate m' = sqrt(h*)(-m^2/2 + omega0#) - 1/sqrt(h*) and find the hand-off.

    ``crossing_time`` is the first time m reaches -sqrt(2 omega0#).
    """
    hs = h_star(constants, law) if h_star_value is None else h_star_value
    om = constants.omega0_sharp
    bar = -math.sqrt(2.0) * math.sqrt(max(om - 1.0 / hs, 0.0))
    if not m0 < bar:
        raise PreconditionError(f"m0 = {m0} must lie strictly below {bar}")
    sq = math.sqrt(hs)
    thr = -math.sqrt(2.0 * om)

    def rhs(t, m):
        return sq * (-0.5 * m * m + om) - 1.0 / sq

    stop = (lambda m: m <= thr) if stop_at_crossing else None
    ts, ms, div = _integrate(rhs, 0.0, m0, t_end, dt, stop)
    crossing = None
    below = np.flatnonzero(ms <= thr)
    if below.size:
        i = int(below[0])
        if i == 0:
            crossing = 0.0
        else:
            # linear refinement inside the last step
            m_a, m_b = ms[i - 1], ms[i]
            crossing = float(ts[i - 1] + (thr - m_a) / (m_b - m_a) * (ts[i] - ts[i - 1]))
    return ComparisonTrajectory("thm33", ts, ms, div, crossing)


def predicted_blowup_bound(state0: LagrangianState, law: GammaLaw, dt: float = 1e-2,
                           t_max: float = 1e4,
                           bound_constant: float = PRINTED_CUBE_CONSTANT) -> float:
    """Upper bound on the blow-up time from the composed comparison ODEs.

    Data past the large-gradient threshold use that ODE alone; data in the
    small-gradient regime first ride the constant-coefficient ODE down to
    -sqrt(2 omega0#) and then switch.
    """
    rep = threshold_report(state0, law, bound_constant=bound_constant)
    if not rep.valid:
        raise NoPredictionError("threshold report is invalid (omega0# <= 0)")
    consts = rep.constants
    if rep.thm11_satisfied:
        traj = comparison_ode_thm11(consts, law, rep.inf_z0, t_max, dt)
    elif rep.thm12_satisfied:
        first = comparison_ode_thm33(consts, law, rep.inf_z0, t_max, dt,
                                     h_star_value=rep.h_star, stop_at_crossing=True)
        if first.crossing_time is None:
            raise NoPredictionError("comparison ODE did not reach the threshold")
        thr = -math.sqrt(2.0 * consts.omega0_sharp)
        traj = comparison_ode_thm11(consts, law, thr, t_max, dt,
                                    t_start=first.crossing_time)
    else:
        raise NoPredictionError("data satisfy neither blow-up criterion")
    if traj.divergence_time is None:
        return math.inf
    return float(traj.divergence_time)


def composed_trajectory(state0: LagrangianState, law: GammaLaw, t_end: float,
                        dt: float = 1e-3,
                        bound_constant: float = PRINTED_CUBE_CONSTANT) -> ComparisonTrajectory:
    """Concatenated m(t) of :func:`predicted_blowup_bound` for plotting and checks."""
    rep = threshold_report(state0, law, bound_constant=bound_constant)
    consts = rep.constants
    if rep.thm11_satisfied:
        return comparison_ode_thm11(consts, law, rep.inf_z0, t_end, dt)
    if not rep.thm12_satisfied:
        raise NoPredictionError("data satisfy neither blow-up criterion")
    first = comparison_ode_thm33(consts, law, rep.inf_z0, t_end, dt,
                                 h_star_value=rep.h_star, stop_at_crossing=True)
    if first.crossing_time is None:
        return first
    thr = -math.sqrt(2.0 * consts.omega0_sharp)
    second = comparison_ode_thm11(consts, law, thr, t_end, dt, t_start=first.crossing_time)
    keep = first.times < first.crossing_time
    return ComparisonTrajectory(
        "thm33+thm11",
        np.concatenate((first.times[keep], second.times)),
        np.concatenate((first.m_values[keep], second.m_values)),
        second.divergence_time, first.crossing_time)


# -- characteristics ---------------------------------------------------------

def z_dynamics_rhs(z_self, z1, z2, h, omega0, law: GammaLaw):
    """sqrt(h) [-(gbar + 1/2) Z_j^2 + gbar Z1 Z2 + omega0 - 1/h]."""
    gb = law.gamma_bar
    return np.sqrt(h) * (-(gb + 0.5) * z_self ** 2 + gb * z1 * z2 + omega0 - 1.0 / h)


def trace_characteristic(snapshots: Sequence[LagrangianState], family: int,
                         xi_start: float, law: GammaLaw) -> CharacteristicTrace:
    """Follow dXi/dt = -/+ h^((gamma+1)/2) through a snapshot sequence.

    Heights are interpolated with cubic splines in xi and linearly in time.
    The residual compares the finite-difference rate of Z_family along the
    curve with the trapezoid average of the Z-dynamics right side.
    """
    if family not in (1, 2):
        raise ValueError("family must be 1 or 2")
    if len(snapshots) < 2:
        raise ValueError("need at least two snapshots")
    sign = -1.0 if family == 1 else 1.0
    grid = snapshots[0].grid
    xi = grid.xi
    lo, hi = xi[0] + 3 * grid.dxi, xi[-1] - 3 * grid.dxi
    expo = 0.5 * (law.gamma + 1.0)
    omega_spline = CubicSpline(xi, potential_vorticity(snapshots[0]).values)

    splines = []
    for s in snapshots:
        z1, z2 = weighted_gradients(s, law)
        splines.append((CubicSpline(xi, s.h.values), CubicSpline(xi, z1.values),
                        CubicSpline(xi, z2.values)))

    def speed(k, w, x):
        hk = (1.0 - w) * splines[k][0](x) + w * splines[k + 1][0](x)
        return sign * max(float(hk), 1e-300) ** expo

    def sample(k, x):
        hs, s1, s2 = splines[k]
        return float(hs(x)), float(s1(x)), float(s2(x))

    times = [snapshots[0].t]
    pos = [float(xi_start)]
    h0, a1, a2 = sample(0, xi_start)
    zs = [a1 if family == 1 else a2]
    rhs_prev = float(z_dynamics_rhs(zs[0], a1, a2, h0, omega_spline(xi_start), law))
    residuals = []
    truncated = False
    x = float(xi_start)
    for k in range(len(snapshots) - 1):
        dt = snapshots[k + 1].t - snapshots[k].t
        k1 = speed(k, 0.0, x)
        k2 = speed(k, 0.5, x + 0.5 * dt * k1)
        k3 = speed(k, 0.5, x + 0.5 * dt * k2)
        k4 = speed(k, 1.0, x + dt * k3)
        x_new = x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not lo <= x_new <= hi:
            truncated = True
            break
        hn, b1, b2 = sample(k + 1, x_new)
        zn = b1 if family == 1 else b2
        rhs_new = float(z_dynamics_rhs(zn, b1, b2, hn, omega_spline(x_new), law))
        residuals.append(abs((zn - zs[-1]) / dt - 0.5 * (rhs_prev + rhs_new)))
        x = x_new
        rhs_prev = rhs_new
        times.append(snapshots[k + 1].t)
        pos.append(x)
        zs.append(zn)
    res = np.array(residuals)
    return CharacteristicTrace(family, np.array(times), np.array(pos), np.array(zs),
                               float(res.max()) if res.size else 0.0, truncated, res)
