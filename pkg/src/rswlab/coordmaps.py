"""Coordinate changes between Eulerian position x and the mass label xi.

phi(x) = int_0^x h0 is the initial label of position x and chi its inverse
written in the label variable. At later times sigma(t, xi) is the position
of particle xi and Upsilon(t, x) the label found at x.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .errors import DomainError
from .fields import LagrangianState
from .grid import Field1D, ddx, make_grid
from .kernels import GammaLaw

DIRECTIONS = ("euler-to-lagrange", "lagrange-to-euler")


@dataclass(frozen=True)
class EulerianState:
    """Fields sampled on a uniform Eulerian x grid."""

    t: float
    h: Field1D
    u: Field1D
    v: Field1D

    @property
    def x(self) -> np.ndarray:
        return self.h.xi


@dataclass
class CoordinateMap:
    """``map_samples[k]`` holds Upsilon(t_k, x) or sigma(t_k, xi) on its argument grid."""

    direction: str
    times: np.ndarray
    map_samples: list[Field1D]
    jacobian_defect_max: float
    truncated: bool = False
    defects: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}")

    def is_monotone(self) -> bool:
        return all(np.all(np.diff(m.values) > 0) for m in self.map_samples)

    def inverse(self, k: int) -> PchipInterpolator:
        """Monotone interpolant of the inverse map at time index ``k``."""
        m = self.map_samples[k]
        return monotone_inverse(m)


def _check_positive(f: Field1D, what: str):
    if np.any(~(f.values > 0)):
        raise DomainError(f"{what} must be positive")


def _cumulative(f: Field1D, anchor: float) -> Field1D:
    vals = f.values
    dx = f.dxi
    cum = np.concatenate(([0.0], np.cumsum(0.5 * dx * (vals[1:] + vals[:-1]))))
    if not f.xi_min <= anchor <= f.xi_max:
        raise DomainError("anchor must lie inside the window")
    offset = PchipInterpolator(f.xi, cum)(anchor)
    return f.with_values(cum - offset)


def phi_map(h0_euler: Field1D, anchor: float = 0.0) -> Field1D:
    """xi = int_anchor^x h0(s) ds on the x grid (cumulative trapezoid)."""
    _check_positive(h0_euler, "density")
    return _cumulative(h0_euler, anchor)


def chi_map(h0_lagrange: Field1D, anchor: float = 0.0) -> Field1D:
    """x = int_anchor^xi dz / h0(z) on the label grid."""
    _check_positive(h0_lagrange, "height")
    return _cumulative(h0_lagrange.with_values(1.0 / h0_lagrange.values), anchor)


def monotone_inverse(samples: Field1D) -> PchipInterpolator:
    """Inverse of a strictly increasing sampled map, by monotone cubic interpolation."""
    y = samples.values
    if not np.all(np.diff(y) > 0):
        raise DomainError("map is not strictly increasing")
    return PchipInterpolator(y, samples.xi, extrapolate=False)


def _time_splines(times, fields: Sequence[np.ndarray], grid: np.ndarray):
    splines = [CubicSpline(grid, f) for f in fields]

    def at(k: int, w: float, pts: np.ndarray) -> np.ndarray:
        a = splines[k](pts)
        if w == 0.0:
            return a
        return (1.0 - w) * a + w * splines[k + 1](pts)

    return at


def _flow(times: np.ndarray, p0: np.ndarray, velocity: Callable, lo: float, hi: float):
    """RK4 with one step per snapshot interval; velocity is linear in time inside it."""
    paths = [p0.copy()]
    p = p0.copy()
    truncated = False
    for k in range(len(times) - 1):
        dt = times[k + 1] - times[k]
        k1 = velocity(k, 0.0, p)
        k2 = velocity(k, 0.5, p + 0.5 * dt * k1)
        k3 = velocity(k, 0.5, p + 0.5 * dt * k2)
        k4 = velocity(k, 1.0, p + dt * k3)
        p = p + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if np.any(p < lo) or np.any(p > hi):
            truncated = True
            break
        paths.append(p.copy())
    return paths, truncated


def _interior(n: int, pad: int = 3) -> slice:
    return slice(pad, n - pad)


def upsilon_flow(snapshots: Sequence[LagrangianState], x_grid: Field1D | None = None,
                 anchor: float = 0.0) -> CoordinateMap:
    """Label-at-position map from a Lagrangian run.

    Integrates dUpsilon/dt = -(u h)(t, Upsilon) from Upsilon(0, x) = chi^-1(x).
    The defect is max |dUpsilon/dx / h(t, x) - 1| with h(t, x) = h(t, Upsilon).
    """
    s0 = snapshots[0]
    xi = s0.xi
    chi = chi_map(s0.h, anchor)
    if x_grid is None:
        x_grid = make_grid(chi.values[0], chi.values[-1], s0.h.n)
    x = x_grid.xi
    ups0 = monotone_inverse(chi)(x)
    if np.any(np.isnan(ups0)):
        raise DomainError("x grid extends beyond the image of chi")
    times = np.array([s.t for s in snapshots])
    flux = _time_splines(times, [s.u.values * s.h.values for s in snapshots], xi)
    paths, truncated = _flow(times, ups0, lambda k, w, p: -flux(k, w, p), xi[0], xi[-1])
    inner = _interior(x.size)
    defects = []
    maps = []
    for k, p in enumerate(paths):
        h_here = CubicSpline(xi, snapshots[k].h.values)(p)
        d = ddx(p, x_grid.dxi) / h_here - 1.0
        defects.append(np.max(np.abs(d[inner])))
        maps.append(x_grid.with_values(p))
    defects = np.array(defects)
    return CoordinateMap("euler-to-lagrange", times[:len(paths)], maps,
                         float(defects.max()), truncated, defects)


def sigma_flow(eulerian: Sequence[EulerianState], xi_grid: Field1D | None = None,
               anchor: float = 0.0) -> CoordinateMap:
    """Particle paths dsigma/dt = u(t, sigma) from sigma(0, xi) = phi^-1(xi).

    The defect is max |h~(t, xi) dsigma/dxi - 1| with h~(t, xi) = h(t, sigma).
    """
    e0 = eulerian[0]
    x = e0.x
    phi = phi_map(e0.h, anchor)
    if xi_grid is None:
        xi_grid = make_grid(phi.values[0], phi.values[-1], e0.h.n)
    xi = xi_grid.xi
    sig0 = monotone_inverse(phi)(xi)
    if np.any(np.isnan(sig0)):
        raise DomainError("label grid extends beyond the image of phi")
    times = np.array([e.t for e in eulerian])
    vel = _time_splines(times, [e.u.values for e in eulerian], x)
    paths, truncated = _flow(times, sig0, vel, x[0], x[-1])
    inner = _interior(xi.size)
    defects = []
    maps = []
    for k, p in enumerate(paths):
        h_here = CubicSpline(x, eulerian[k].h.values)(p)
        d = h_here * ddx(p, xi_grid.dxi) - 1.0
        defects.append(np.max(np.abs(d[inner])))
        maps.append(xi_grid.with_values(p))
    defects = np.array(defects)
    return CoordinateMap("lagrange-to-euler", times[:len(paths)], maps,
                         float(defects.max()), truncated, defects)


def _resample(src_grid: np.ndarray, values: np.ndarray, pts: np.ndarray) -> np.ndarray:
    if pts.min() < src_grid[0] - 1e-12 or pts.max() > src_grid[-1] + 1e-12:
        raise DomainError("resampling would extrapolate beyond the map range")
    return CubicSpline(src_grid, values)(pts)


def lagrange_to_euler(snapshots: Sequence[LagrangianState],
                      upsilon: CoordinateMap) -> list[EulerianState]:
    """h(t, x) = h~(t, Upsilon(t, x)) and likewise for u, v."""
    if upsilon.direction != "euler-to-lagrange":
        raise ValueError("need the Upsilon map (euler-to-lagrange)")
    out = []
    for s, m in zip(snapshots, upsilon.map_samples):
        xi, p = s.xi, m.values
        h, u, v = (_resample(xi, f, p) for f in s.arrays())
        out.append(EulerianState(s.t, m.with_values(h), m.with_values(u), m.with_values(v)))
    return out


def euler_to_lagrange(eulerian: Sequence[EulerianState],
                      sigma: CoordinateMap) -> list[LagrangianState]:
    """h~(t, xi) = h(t, sigma(t, xi)) and likewise for u, v."""
    if sigma.direction != "lagrange-to-euler":
        raise ValueError("need the sigma map (lagrange-to-euler)")
    out = []
    for e, m in zip(eulerian, sigma.map_samples):
        x, p = e.x, m.values
        h, u, v = (_resample(x, f.values, p) for f in (e.h, e.u, e.v))
        out.append(LagrangianState.from_arrays(e.t, m, h, u, v))
    return out


def inverse_defect(upsilon: CoordinateMap, sigma: CoordinateMap) -> float:
    """max |Upsilon(t, sigma(t, xi)) - xi| over common times and interior labels."""
    worst = 0.0
    for ups, sig in zip(upsilon.map_samples, sigma.map_samples):
        inner = _interior(sig.n)
        p = sig.values[inner]
        ok = (p >= ups.xi_min) & (p <= ups.xi_max)
        back = CubicSpline(ups.xi, ups.values)(p[ok])
        worst = max(worst, float(np.max(np.abs(back - sig.xi[inner][ok]))))
    return worst


def eulerian_residuals(states: Sequence[EulerianState], law: GammaLaw):
    """Max interior residuals of the three Eulerian balance laws at interior times.

    Time derivatives use the second-order three-point formula over
    neighbouring snapshots (spacing may vary); x derivatives use the
    fourth-order diagnostic stencil.
    Returns ``(times, mass, momentum_x, momentum_y)``.
    """
    if len(states) < 3:
        raise ValueError("need at least three snapshots")
    g = law.gamma
    ts = np.array([s.t for s in states])
    res = ([], [], [])
    dx = states[0].h.dxi
    for k in range(1, len(states) - 1):
        a, b, c = states[k - 1], states[k], states[k + 1]
        d1, d2 = b.t - a.t, c.t - b.t
        wa, wc = -d2 / (d1 * (d1 + d2)), d1 / (d2 * (d1 + d2))
        wb = -(wa + wc)

        def dt_of(fa, fb, fc):
            return wa * fa + wb * fb + wc * fc

        h, u, v = b.h.values, b.u.values, b.v.values
        inner = _interior(h.size)
        r_mass = dt_of(a.h.values, h, c.h.values) + ddx(h * u, dx)
        r_mx = (dt_of(a.h.values * a.u.values, h * u, c.h.values * c.u.values)
                + ddx(h * u * u + h ** g / g, dx) - h * v)
        r_my = (dt_of(a.h.values * a.v.values, h * v, c.h.values * c.v.values)
                + ddx(h * u * v, dx) + h * u)
        for store, r in zip(res, (r_mass, r_mx, r_my)):
            store.append(float(np.max(np.abs(r[inner]))))
    return ts[1:-1], np.array(res[0]), np.array(res[1]), np.array(res[2])
