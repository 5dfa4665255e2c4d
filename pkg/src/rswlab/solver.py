"""Method-of-lines solver for the Lagrangian system in Riemann-invariant form.

R1 is transported with speed -c, R2 with +c (c = h**((gamma+1)/2)) and R3
is not transported; the sources couple them through rotation. Each family
gets an upwind-biased stencil, time integration is classical RK4 with a CFL
step recomputed every step.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NumericalFailure, VacuumError
from .fields import (DiagnosticsRecord, LagrangianState, RiemannState,
                     bound_constants, diagnose, potential_vorticity,
                     to_riemann)
from .kernels import GammaLaw

#: rows at each end of the window that are never transported
FROZEN = 2


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepping and termination settings.

    ``blowup_z_floor`` is the nominal detection level. On a finite grid the
    trigger actually used is the less negative of that floor and the
    resolution limit ``min(-unresolved_jump * M0 / dxi, -min_amplification * |inf Z0|)``;
    see :func:`effective_z_floor`.
    """

    t_end: float = 10.0
    sample_interval: float = 0.1
    cfl: float = 0.4
    blowup_z_floor: float = -1e4
    dt_floor: float = 1e-12
    scheme_order: int = 4
    unresolved_jump: float = 0.1
    min_amplification: float = 10.0
    check_boundary: bool = True
    keep_snapshots: bool = False
    dt_max: float | None = None

    def __post_init__(self):
        if not (0.0 < self.cfl <= 1.0):
            raise ValueError("cfl must lie in (0, 1]")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if not (0.0 < self.sample_interval <= self.t_end):
            raise ValueError("sample_interval must lie in (0, t_end]")
        if not self.blowup_z_floor < 0:
            raise ValueError("blowup_z_floor must be negative")
        if not self.dt_floor > 0:
            raise ValueError("dt_floor must be positive")
        if self.scheme_order not in (2, 4):
            raise ValueError("scheme_order must be 2 or 4")


STATUSES = ("survived", "blowup", "vacuum", "boundary-contact", "numerical-failure")


@dataclass
class RunOutcome:
    status: str
    t_final: float
    diagnostics: list[DiagnosticsRecord]
    blowup_location: float | None = None
    predicted_bound: float | None = None
    z_floor: float | None = None
    w0_sharp: float | None = None
    final_state: LagrangianState | None = None
    snapshots: list[LagrangianState] = field(default_factory=list)
    message: str = ""

    @property
    def times(self) -> np.ndarray:
        return np.array([d.t for d in self.diagnostics])

    def series(self, name: str) -> np.ndarray:
        return np.array([getattr(d, name) for d in self.diagnostics])


class Verdict(str, enum.Enum):
    NONE = "none"
    BLOWUP = "blowup"
    NUMERICAL_FAILURE = "numerical-failure"

    def __bool__(self):
        return self is Verdict.BLOWUP


def detect_blowup(history: Sequence[DiagnosticsRecord], config: SolverConfig,
                  w0_sharp: float | None = None,
                  z_floor: float | None = None) -> Verdict:
    """One-sided gradient catastrophe check on a diagnostics history.

    Blow-up means min Z reached the floor while max Z stayed under
    ``W0 + 0.05 |W0|``; if max Z escaped as well the run is classified as a
    numerical failure. Without ``w0_sharp`` the first record's max Z is used.
    """
    if not history:
        raise ValueError("empty history")
    floor = config.blowup_z_floor if z_floor is None else z_floor
    last = history[-1]
    if not last.min_z <= floor:
        return Verdict.NONE
    w0 = history[0].max_z if w0_sharp is None else w0_sharp
    cap = w0 + 0.05 * abs(w0)
    if max(rec.max_z for rec in history) <= cap:
        return Verdict.BLOWUP
    return Verdict.NUMERICAL_FAILURE


def effective_z_floor(config: SolverConfig, dxi: float, m0: float,
                      inf_z0: float) -> float:
    """Detection level for min Z on a grid of spacing ``dxi``.

    A gradient blow-up sharpens R across ever fewer cells; once the jump per
    cell is a fraction ``unresolved_jump`` of the data scale ``m0`` (and the
    gradient has grown ``min_amplification``-fold) the grid can no longer
    follow it. As ``dxi -> 0`` this tends to ``config.blowup_z_floor``.
    """
    resolved = -config.unresolved_jump * max(m0, 1e-300) / dxi
    grown = -config.min_amplification * abs(inf_z0)
    return max(config.blowup_z_floor, min(resolved, grown))


def max_wave_speed(state: LagrangianState, law: GammaLaw) -> float:
    h = state.h.values
    if np.any(~(h > 0)):
        raise VacuumError("height field is not strictly positive")
    return float(np.max(h ** (0.5 * (law.gamma + 1.0))))


# -- spatial operators -------------------------------------------------------

def _pad(f: np.ndarray) -> np.ndarray:
    return np.concatenate((np.full(3, f[0]), f, np.full(3, f[-1])))


def _d_left(f: np.ndarray, dx: float, order: int) -> np.ndarray:
    """Upwind derivative for rightward transport (stencil leans left)."""
    p = _pad(f)
    n = f.size
    c = p[3:3 + n]
    m1, m2 = p[2:2 + n], p[1:1 + n]
    if order == 2:
        return (3.0 * c - 4.0 * m1 + m2) / (2.0 * dx)
    m3, p1 = p[0:n], p[4:4 + n]
    return (-m3 + 6.0 * m2 - 18.0 * m1 + 10.0 * c + 3.0 * p1) / (12.0 * dx)


def _d_right(f: np.ndarray, dx: float, order: int) -> np.ndarray:
    """Upwind derivative for leftward transport (stencil leans right)."""
    p = _pad(f)
    n = f.size
    c = p[3:3 + n]
    p1, p2 = p[4:4 + n], p[5:5 + n]
    if order == 2:
        return (-3.0 * c + 4.0 * p1 - p2) / (2.0 * dx)
    p3, m1 = p[6:6 + n], p[2:2 + n]
    return (-3.0 * m1 - 10.0 * c + 18.0 * p1 - 6.0 * p2 + p3) / (12.0 * dx)


def _d_center(f: np.ndarray, dx: float) -> np.ndarray:
    p = _pad(f)
    n = f.size
    return (p[1:1 + n] - 8.0 * p[2:2 + n] + 8.0 * p[4:4 + n] - p[5:5 + n]) / (12.0 * dx)


def _height_and_speed(r1, r2, law: GammaLaw):
    half = 0.5 * (r2 - r1)
    g = law.gamma
    if g == 1.0:
        h = np.exp(half)
        return h, h
    base = 0.5 * (g - 1.0) * half + 1.0
    if not np.all(base > 0):
        if not np.all(np.isfinite(base)):
            raise NumericalFailure("non-finite Riemann invariants")
        raise VacuumError("Riemann invariants crossed the vacuum boundary")
    h = base ** (2.0 / (g - 1.0))
    c = base ** ((g + 1.0) / (g - 1.0))
    return h, c


def riemann_rhs(y: np.ndarray, dx: float, law: GammaLaw, order: int = 4) -> np.ndarray:
    """Time derivative of the stacked invariants ``y = [R1, R2, R3]``."""
    r1, r2, r3 = y
    _, c = _height_and_speed(r1, r2, law)
    d1 = _d_right(r1, dx, order)
    d2 = _d_left(r2, dx, order)
    for d in (d1, d2):
        d[:FROZEN] = 0.0
        d[-FROZEN:] = 0.0
    out = np.empty_like(y)
    out[0] = c * d1 + r3
    out[1] = -c * d2 + r3
    out[2] = -0.5 * (r1 + r2)
    return out


def rk4(f: Callable[[np.ndarray], np.ndarray], y: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    y_new = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(y_new)):
        raise NumericalFailure("non-finite values after RK4 step")
    return y_new


def step(rs: RiemannState, dt: float, law: GammaLaw, config: SolverConfig) -> RiemannState:
    """One RK4 step of the semi-discrete invariant system."""
    dx = rs.r1.dxi
    y = np.stack((rs.r1.values, rs.r2.values, rs.r3.values))
    y_new = rk4(lambda q: riemann_rhs(q, dx, law, config.scheme_order), y, dt)
    g = rs.r1
    return RiemannState(rs.t + dt, g.with_values(y_new[0]), g.with_values(y_new[1]),
                        g.with_values(y_new[2]))


# -- generic marching loop ---------------------------------------------------

class _Model:
    """Adapter the marching loop drives; ``y`` is a stacked state array."""

    def rhs(self, y): ...

    def max_speed(self, y) -> float: ...

    def primitive(self, y): ...

    def min_z(self, y): ...


class _RiemannModel(_Model):
    def __init__(self, dx, law, order):
        self.dx, self.law, self.order = dx, law, order

    def rhs(self, y):
        return riemann_rhs(y, self.dx, self.law, self.order)

    def max_speed(self, y):
        _, c = _height_and_speed(y[0], y[1], self.law)
        return float(c.max())

    def primitive(self, y):
        h, _ = _height_and_speed(y[0], y[1], self.law)
        return h, 0.5 * (y[0] + y[1]), y[2]

    def min_z(self, y):
        h, _ = _height_and_speed(y[0], y[1], self.law)
        sq = np.sqrt(h)
        z = np.minimum(sq * _d_center(y[0], self.dx), sq * _d_center(y[1], self.dx))
        i = int(np.argmin(z))
        return float(z[i]), i


def march(model: _Model, y0: np.ndarray, state0: LagrangianState, law: GammaLaw,
          config: SolverConfig, keep_raw: bool = False):
    """Advance ``y0`` to ``config.t_end``; returns ``(RunOutcome, raw_snapshots)``."""
    grid = state0.grid
    dx = grid.dxi
    omega0 = potential_vorticity(state0)
    consts = bound_constants(state0, law)
    rec0 = diagnose(state0, law, omega0)
    z_floor = effective_z_floor(config, dx, consts.m0, rec0.min_z)
    n = grid.n

    def as_state(t, y):
        h, u, v = model.primitive(y)
        return LagrangianState.from_arrays(t, grid, h, u, v)

    history = [rec0]
    snaps = [state0] if config.keep_snapshots else []
    raw = [(0.0, y0.copy())] if keep_raw else []
    out = RunOutcome("survived", 0.0, history, z_floor=z_floor, w0_sharp=consts.w0_sharp,
                     snapshots=snaps)

    t = 0.0
    y = y0.copy()
    k_sample = 1
    n_samples = int(math.floor(config.t_end / config.sample_interval + 1e-9))
    prev_min_z = rec0.min_z

    def next_sample_time():
        if k_sample <= n_samples:
            return min(k_sample * config.sample_interval, config.t_end)
        return config.t_end

    def finish(status, t_now, y_now, message=""):
        out.status = status
        out.t_final = t_now
        out.message = message
        try:
            out.final_state = as_state(t_now, y_now)
        except (VacuumError, NumericalFailure):
            out.final_state = None
        return out, raw

    while t < config.t_end:
        try:
            speed = model.max_speed(y)
        except VacuumError as exc:
            return finish("vacuum", t, y, str(exc))
        dt = config.cfl * dx / speed
        if config.dt_max is not None:
            dt = min(dt, config.dt_max)
        t_next = next_sample_time()
        landing = t + dt >= t_next - 1e-9 * config.sample_interval
        if landing:
            dt = t_next - t
        if dt < config.dt_floor and not landing:
            zmin, _ = model.min_z(y)
            status = "blowup" if zmin < prev_min_z else "numerical-failure"
            return finish(status, t, y, "time step collapsed below dt_floor")
        try:
            y = rk4(model.rhs, y, dt)
        except VacuumError as exc:
            return finish("vacuum", t, y, str(exc))
        except NumericalFailure as exc:
            return finish("numerical-failure", t, y, str(exc))
        t = t_next if landing else t + dt
        if landing:
            k_sample += 1

        try:
            zmin, iz = model.min_z(y)
        except VacuumError as exc:
            return finish("vacuum", t, y, str(exc))
        if zmin <= z_floor:
            state = as_state(t, y)
            history.append(diagnose(state, law, omega0))
            if config.keep_snapshots:
                snaps.append(state)
            if keep_raw:
                raw.append((t, y.copy()))
            verdict = detect_blowup(history, config, consts.w0_sharp, z_floor)
            if verdict is Verdict.BLOWUP:
                out.blowup_location = float(grid.xi[iz])
                return finish("blowup", t, y)
            if verdict is Verdict.NUMERICAL_FAILURE:
                return finish("numerical-failure", t, y, "two-sided gradient divergence")
            # edge-stencil difference between the fast check and the diagnostic
            history.pop()
            if config.keep_snapshots:
                snaps.pop()
            if keep_raw:
                raw.pop()
        prev_min_z = zmin

        if config.check_boundary:
            h, u, v = model.primitive(y)
            mag = np.maximum(np.abs(h - 1.0), np.maximum(np.abs(u), np.abs(v)))
            top = mag.max()
            if top > 0:
                idx = np.flatnonzero(mag > 1e-10 * top)
                if idx[0] <= FROZEN or idx[-1] >= n - 1 - FROZEN:
                    state = as_state(t, y)
                    history.append(diagnose(state, law, omega0))
                    return finish("boundary-contact", t, y,
                                  "perturbation support reached the window edge")

        if landing:
            state = as_state(t, y)
            history.append(diagnose(state, law, omega0))
            if config.keep_snapshots:
                snaps.append(state)
            if keep_raw:
                raw.append((t, y.copy()))
    return finish("survived", t, y)


def run(state0: LagrangianState, law: GammaLaw, config: SolverConfig) -> RunOutcome:
    """Integrate from ``state0`` until ``t_end``, blow-up, vacuum or boundary contact."""
    rs = to_riemann(state0, law)
    y0 = np.stack((rs.r1.values, rs.r2.values, rs.r3.values))
    model = _RiemannModel(state0.dxi, law, config.scheme_order)
    outcome, _ = march(model, y0, state0, law, config)
    return outcome

