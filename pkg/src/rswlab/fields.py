"""Grid states, initial data and per-snapshot diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import DomainError, VacuumError
from .grid import Field1D, ddx, trapezoid
from .kernels import (BoundConstants, GammaLaw, PRINTED_CUBE_CONSTANT,
                      energy_density, f_gamma_inv, kappa, vartheta,
                      vacuum_boundary)

BUMP_KINDS = ("height-bump", "velocity-bump", "constant-pv")
#: relative level above which a sample counts as inside the perturbation support
SUPPORT_LEVEL = 1e-10


@dataclass(frozen=True)
class LagrangianState:
    t: float
    h: Field1D
    u: Field1D
    v: Field1D

    def __post_init__(self):
        if not (self.h.same_grid(self.u) and self.h.same_grid(self.v)):
            raise ValueError("h, u, v must share one grid")

    @property
    def grid(self) -> Field1D:
        return self.h

    @property
    def dxi(self) -> float:
        return self.h.dxi

    @property
    def xi(self) -> np.ndarray:
        return self.h.xi

    def arrays(self):
        return self.h.values, self.u.values, self.v.values

    @classmethod
    def from_arrays(cls, t, grid: Field1D, h, u, v) -> "LagrangianState":
        return cls(float(t), grid.with_values(h), grid.with_values(u),
                   grid.with_values(v))


@dataclass(frozen=True)
class RiemannState:
    t: float
    r1: Field1D
    r2: Field1D
    r3: Field1D


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    energy: float
    min_z: float
    max_z: float
    min_h: float
    max_h: float
    max_pv_drift: float
    max_abs_r: float
    support_halfwidth: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ThresholdReport:
    constants: BoundConstants
    thm11_threshold: float
    thm12_threshold: float
    inf_z0: float
    thm11_satisfied: bool
    thm12_satisfied: bool
    h_star: float
    alpha_bound: float
    valid: bool = True
    energy_zero: bool = False
    bound_constant: float = PRINTED_CUBE_CONSTANT

    def as_dict(self) -> dict:
        return asdict(self)


def _require_positive_h(h: np.ndarray):
    if np.any(~(h > 0)):
        raise VacuumError("height field is not strictly positive")


def bump_profile(s, exponent: int = 3) -> np.ndarray:
    """(1 - s^2)^p on |s| <= 1, zero outside; C^(p-1) across the edge."""
    s = np.asarray(s, dtype=float)
    return np.where(np.abs(s) < 1.0, (1.0 - s * s) ** exponent, 0.0)


def bump_profile_sq_integral(exponent: int = 3) -> float:
    """Exact integral of (1 - s^2)^(2p) over [-1, 1]."""
    # int_{-1}^{1} (1-s^2)^n ds = 2^(2n+1) (n!)^2 / (2n+1)!
    n = 2 * exponent
    return 2.0 ** (2 * n + 1) * math.factorial(n) ** 2 / math.factorial(2 * n + 1)


def make_bump_data(kind: str, amplitude: float, width: float, grid: Field1D,
                   center: float = 0.0, exponent: int = 3) -> LagrangianState:
    """Compactly supported t=0 data around the constant state (1, 0, 0).

    ``height-bump`` perturbs h, ``velocity-bump`` perturbs u, and
    ``constant-pv`` perturbs v and sets h = 1/(1 - dv/dxi) with the same
    stencil as :func:`potential_vorticity`, so the discrete PV is exactly 1.
    The default kernel exponent 3 is C^2 at the support edge; grid-convergence
    studies of fourth-order stencils want ``exponent >= 5``.
    """
    if kind not in BUMP_KINDS:
        raise ValueError(f"unknown bump kind {kind!r}; expected one of {BUMP_KINDS}")
    if not width > 0:
        raise ValueError("width must be positive")
    if int(exponent) != exponent or exponent < 2:
        raise ValueError("exponent must be an integer >= 2 (C^1 data)")
    xi = grid.xi
    span = grid.xi_max - grid.xi_min
    margin = 0.1 * span
    if center - width < grid.xi_min + margin or center + width > grid.xi_max - margin:
        raise ValueError("bump must sit at least 10% of the window away from each edge")
    b = amplitude * bump_profile((xi - center) / width, exponent)
    one = np.ones_like(xi)
    zero = np.zeros_like(xi)
    if kind == "height-bump":
        h, u, v = one + b, zero, zero
    elif kind == "velocity-bump":
        h, u, v = one, b, zero
    else:
        dv = ddx(b, grid.dxi)
        if np.any(dv >= 1.0):
            raise VacuumError("constant-pv data needs dv/dxi < 1 everywhere")
        h, u, v = 1.0 / (1.0 - dv), zero, b
    if np.any(~(h > 0)):
        raise VacuumError("amplitude produces a non-positive height")
    return LagrangianState.from_arrays(0.0, grid, h, u, v)


def to_riemann(state: LagrangianState, law: GammaLaw) -> RiemannState:
    h, u, v = state.arrays()
    _require_positive_h(h)
    k = kappa(h, law)
    g = state.grid
    return RiemannState(state.t, g.with_values(u - k), g.with_values(u + k),
                        g.with_values(v.copy()))


def from_riemann(rs: RiemannState, law: GammaLaw) -> LagrangianState:
    r1, r2, r3 = rs.r1.values, rs.r2.values, rs.r3.values
    half = 0.5 * (r2 - r1)
    if np.any(~(half > vacuum_boundary(law))):
        raise VacuumError("Riemann invariants cross the vacuum boundary")
    h = vartheta(half, law)
    return LagrangianState.from_arrays(rs.t, rs.r1, h, 0.5 * (r1 + r2), r3)


def weighted_gradients(state: LagrangianState, law: GammaLaw):
    """(Z1, Z2) = sqrt(h) [u' -/+ h**((gamma-3)/2) h']."""
    h, u, _ = state.arrays()
    _require_positive_h(h)
    du = ddx(u, state.dxi)
    dh = ddx(h, state.dxi)
    sq = np.sqrt(h)
    w = h ** (0.5 * (law.gamma - 3.0)) * dh
    g = state.grid
    return g.with_values(sq * (du - w)), g.with_values(sq * (du + w))


def potential_vorticity(state: LagrangianState) -> Field1D:
    h, _, v = state.arrays()
    _require_positive_h(h)
    return state.grid.with_values(1.0 / h + ddx(v, state.dxi))


def total_energy(state: LagrangianState, law: GammaLaw) -> float:
    h, u, v = state.arrays()
    _require_positive_h(h)
    return trapezoid(0.5 * (u * u + v * v) + energy_density(h, law), state.dxi)


def perturbation_magnitude(state: LagrangianState) -> np.ndarray:
    h, u, v = state.arrays()
    return np.maximum(np.abs(h - 1.0), np.maximum(np.abs(u), np.abs(v)))


def support_bounds(state: LagrangianState, level: float = SUPPORT_LEVEL):
    """Index range of samples above ``level`` times the sup norm, or None."""
    mag = perturbation_magnitude(state)
    top = mag.max()
    if top == 0.0:
        return None
    idx = np.flatnonzero(mag > level * top)
    return int(idx[0]), int(idx[-1])


def support_halfwidth(state: LagrangianState) -> float:
    b = support_bounds(state)
    if b is None:
        return 0.0
    return 0.5 * (b[1] - b[0]) * state.dxi


def max_abs_riemann(state: LagrangianState, law: GammaLaw) -> float:
    rs = to_riemann(state, law)
    return float(max(np.abs(rs.r1.values).max(), np.abs(rs.r2.values).max(),
                     np.abs(rs.r3.values).max()))


def diagnose(state: LagrangianState, law: GammaLaw,
             omega0: Field1D | None = None) -> DiagnosticsRecord:
    """All per-snapshot scalars; PV drift is measured against ``omega0``."""
    h = state.h.values
    z1, z2 = weighted_gradients(state, law)
    pv = potential_vorticity(state).values
    drift = 0.0 if omega0 is None else float(np.max(np.abs(pv - omega0.values)))
    return DiagnosticsRecord(
        t=float(state.t),
        energy=total_energy(state, law),
        min_z=float(min(z1.values.min(), z2.values.min())),
        max_z=float(max(z1.values.max(), z2.values.max())),
        min_h=float(h.min()),
        max_h=float(h.max()),
        max_pv_drift=drift,
        max_abs_r=max_abs_riemann(state, law),
        support_halfwidth=support_halfwidth(state),
    )


def bound_constants(state0: LagrangianState, law: GammaLaw) -> BoundConstants:
    """Constants of the a-priori bounds evaluated on t=0 grid data."""
    z1, z2 = weighted_gradients(state0, law)
    omega = potential_vorticity(state0).values
    return BoundConstants.build(
        omega0_sharp=float(omega.max()),
        z0_sharp=float(max(z1.values.max(), z2.values.max())),
        e0=total_energy(state0, law),
        m0=max_abs_riemann(state0, law),
        h0_min=float(state0.h.values.min()),
    )


def infimum_z(state: LagrangianState, law: GammaLaw) -> float:
    z1, z2 = weighted_gradients(state, law)
    return float(min(z1.values.min(), z2.values.min()))


def threshold_report(state0: LagrangianState, law: GammaLaw,
                     bound_constant: float = PRINTED_CUBE_CONSTANT) -> ThresholdReport:
    """Evaluate both blow-up criteria on t=0 data.

    The small-gradient verdict also requires inf Z0 > -sqrt(2 omega0#), i.e.
    the data sit in the gap window where the large-gradient theorem does not
    already apply. Zero energy uses the continuous extension F^-1(0) = 0.
    """
    z1, z2 = weighted_gradients(state0, law)
    omega = potential_vorticity(state0).values
    om_sharp = float(omega.max())
    inf_z0 = float(min(z1.values.min(), z2.values.min()))
    z0_sharp = float(max(z1.values.max(), z2.values.max()))
    e0 = total_energy(state0, law)
    m0 = max_abs_riemann(state0, law)
    h0_min = float(state0.h.values.min())
    if om_sharp <= 0:
        nan = float("nan")
        consts = BoundConstants(om_sharp, z0_sharp, nan, nan, e0, m0, h0_min)
        return ThresholdReport(consts, nan, nan, inf_z0, False, False, nan, nan,
                               valid=False, energy_zero=(e0 == 0.0),
                               bound_constant=bound_constant)
    consts = BoundConstants.build(om_sharp, z0_sharp, e0, m0, h0_min)
    thr11 = -math.sqrt(2.0 * om_sharp)
    alpha = f_gamma_inv(consts.g0 * e0, law, bound_constant=bound_constant)
    h_star = (alpha + 1.0) ** (2.0 / law.gamma)
    thr12 = -math.sqrt(2.0) * math.sqrt(max(om_sharp - 1.0 / h_star, 0.0))
    return ThresholdReport(
        constants=consts,
        thm11_threshold=thr11,
        thm12_threshold=thr12,
        inf_z0=inf_z0,
        thm11_satisfied=inf_z0 <= thr11,
        thm12_satisfied=thr11 < inf_z0 < thr12,
        h_star=h_star,
        alpha_bound=alpha,
        valid=True,
        energy_zero=(e0 == 0.0),
        bound_constant=bound_constant,
    )


def alpha_sharp(state: LagrangianState, law: GammaLaw) -> float:
    """sup(h**(gamma/2) - 1) over the grid."""
    return float(np.max(state.h.values ** (0.5 * law.gamma) - 1.0))
