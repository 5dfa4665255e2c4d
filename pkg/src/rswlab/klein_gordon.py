"""Quasilinear Klein-Gordon form of the gamma = 2 system.

With potential vorticity omega0 fixed per label, h = 1/(omega0 - v') and
u = -v_t, and v alone obeys

    v_tt = (v'' - omega0') / (omega0 - v')**3 - v.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, VacuumError
from .fields import LagrangianState, potential_vorticity
from .grid import Field1D, d2dx2, ddx
from .kernels import GammaLaw
from .solver import FROZEN, RunOutcome, SolverConfig, _Model, march, run

KG_LAW = GammaLaw(2.0)


@dataclass(frozen=True)
class KGState:
    t: float
    v: Field1D
    vt: Field1D
    omega0: Field1D

    def __post_init__(self):
        if not (self.v.same_grid(self.vt) and self.v.same_grid(self.omega0)):
            raise ValueError("v, vt, omega0 must share one grid")

    @classmethod
    def from_primitive(cls, state: LagrangianState) -> "KGState":
        """KG data from primitive data: v, v_t = -u, omega0 = 1/h + v'."""
        return cls(state.t, state.v, state.u.with_values(-state.u.values),
                   potential_vorticity(state))


def _stiffness(v: np.ndarray, omega0: np.ndarray, dx: float) -> np.ndarray:
    d = omega0 - ddx(v, dx)
    if np.any(~(d > 0)):
        raise VacuumError("omega0 - dv/dxi must stay positive")
    return d


def _accel(v, omega0, domega0, dx):
    d = _stiffness(v, omega0, dx)
    num = d2dx2(v, dx)
    if domega0 is not None:
        num = num - domega0
    return num / d ** 3 - v


def _omega_slope(omega0: np.ndarray, dx: float):
    if np.all(omega0 == omega0[0]):
        return None
    return ddx(omega0, dx)


def kg_rhs(state: KGState) -> Field1D:
    """v_tt at every grid point."""
    om = state.omega0.values
    dx = state.v.dxi
    return state.v.with_values(_accel(state.v.values, om, _omega_slope(om, dx), dx))


def kg_to_primitive(state: KGState) -> LagrangianState:
    d = _stiffness(state.v.values, state.omega0.values, state.v.dxi)
    return LagrangianState.from_arrays(state.t, state.v, 1.0 / d, -state.vt.values,
                                       state.v.values)


class _KGModel(_Model):
    """``y = [v, v_t]``; edge rows keep only the mass term."""

    def __init__(self, omega0: np.ndarray, dx: float):
        self.om = omega0
        self.dom = _omega_slope(omega0, dx)
        self.dx = dx

    def rhs(self, y):
        v, vt = y
        acc = _accel(v, self.om, self.dom, self.dx)
        acc[:FROZEN] = -v[:FROZEN]
        acc[-FROZEN:] = -v[-FROZEN:]
        return np.stack((vt, acc))

    def max_speed(self, y):
        return float(np.max(_stiffness(y[0], self.om, self.dx) ** -1.5))

    def primitive(self, y):
        return 1.0 / _stiffness(y[0], self.om, self.dx), -y[1], y[0]

    def min_z(self, y):
        h, u, _ = self.primitive(y)
        sq = np.sqrt(h)
        du = ddx(u, self.dx)
        w = ddx(h, self.dx) / sq
        z = np.minimum(sq * (du - w), sq * (du + w))
        i = int(np.argmin(z))
        return float(z[i]), i


def kg_run(state0: KGState, config: SolverConfig):
    """March the KG system; returns ``(states, outcome)`` with one state per sample."""
    prim0 = kg_to_primitive(state0)
    y0 = np.stack((state0.v.values, state0.vt.values))
    model = _KGModel(state0.omega0.values, state0.v.dxi)
    outcome, raw = march(model, y0, prim0, KG_LAW, config, keep_raw=True)
    g = state0.v
    states = [KGState(t, g.with_values(y[0]), g.with_values(y[1]), state0.omega0)
              for t, y in raw]
    return states, outcome


def null_coeffs(omega1: float):
    """Re-derive the cubic and quartic null-form coefficients by complex substitution.

    Q(a, b) = 3 b a and P(a, b) = 6 b^2 a come from the Taylor expansion of
    (1 - x)^-3; the coefficients are -i Q(-a, i b) and -P(-a, i b) at
    (a, b) = (omega1^2, omega1).
    """
    def q(a, b):
        return 3 * b * a

    def p(a, b):
        return 6 * b * b * a

    a = complex(omega1 * omega1)
    b = complex(omega1)
    q1 = -1j * q(-a, 1j * b)
    p2 = -p(-a, 1j * b)
    for name, val in (("q1pp", q1), ("p2pp", p2)):
        if val.imag != 0.0:
            raise ArithmeticError(f"{name} has a nonzero imaginary part {val.imag}")
    return q1.real, p2.real


@dataclass
class CrossValidation:
    times: np.ndarray
    dh: np.ndarray
    du: np.ndarray
    dv: np.ndarray
    primitive_status: str
    kg_status: str

    @property
    def max_discrepancy(self) -> float:
        if self.times.size == 0:
            return 0.0
        return float(max(self.dh.max(), self.du.max(), self.dv.max()))


def cross_validate(state0: LagrangianState, law: GammaLaw,
                   config: SolverConfig, pv_tol: float = 1e-10) -> CrossValidation:
    """Run both formulations from the same data and compare (h, u, v) at sample times."""
    if law.gamma != 2.0:
        raise PreconditionError("the KG equivalence is defined for gamma = 2")
    om = potential_vorticity(state0).values
    if np.max(np.abs(om - om[0])) > pv_tol:
        raise PreconditionError("initial potential vorticity is not constant")
    cfg = dataclasses.replace(config, keep_snapshots=True)
    prim: RunOutcome = run(state0, law, cfg)
    kg_states, kg_out = kg_run(KGState.from_primitive(state0), cfg)
    by_t = {round(s.t, 12): s for s in prim.snapshots}
    ts, dh, du, dv = [], [], [], []
    for ks in kg_states:
        ps = by_t.get(round(ks.t, 12))
        if ps is None:
            continue
        kp = kg_to_primitive(ks)
        ts.append(ks.t)
        dh.append(np.max(np.abs(kp.h.values - ps.h.values)))
        du.append(np.max(np.abs(kp.u.values - ps.u.values)))
        dv.append(np.max(np.abs(kp.v.values - ps.v.values)))
    return CrossValidation(np.array(ts), np.array(dh), np.array(du), np.array(dv),
                           prim.status, kg_out.status)
