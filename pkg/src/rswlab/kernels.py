"""Closed-form scalar quantities of the blow-up theory.

Every function accepts scalars or numpy arrays and returns the same shape
(a Python float for scalar input).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .grid import Field1D

#: constant printed in the cubic sup-norm inequality behind the small-gradient height bound
PRINTED_CUBE_CONSTANT = 0.75
#: constant the argument actually supports (min of squared half-line norms)
VALID_CUBE_CONSTANT = 1.5


@dataclass(frozen=True)
class GammaLaw:
    """Pressure law p = h**gamma / gamma with gamma >= 1."""

    gamma: float = 2.0

    def __post_init__(self):
        if not (np.isfinite(self.gamma) and self.gamma >= 1.0):
            raise DomainError(f"gamma must be >= 1, got {self.gamma}")

    @property
    def gamma_bar(self) -> float:
        return (self.gamma - 1.0) / 4.0

    @property
    def is_isothermal(self) -> bool:
        return self.gamma == 1.0


@dataclass(frozen=True)
class BoundConstants:
    """Scalar constants entering the a-priori bounds and the thresholds."""

    omega0_sharp: float
    z0_sharp: float
    w0_sharp: float
    g0: float
    e0: float
    m0: float
    h0_min: float

    @classmethod
    def build(cls, omega0_sharp, z0_sharp, e0, m0, h0_min) -> "BoundConstants":
        """Fill the derived constants W0 and G0 from the primary ones."""
        if omega0_sharp <= 0:
            raise DomainError("omega0_sharp must be positive")
        root = math.sqrt(2.0 * omega0_sharp)
        w0 = max(z0_sharp, root)
        return cls(omega0_sharp=float(omega0_sharp), z0_sharp=float(z0_sharp),
                   w0_sharp=float(w0), g0=float(root + w0), e0=float(e0),
                   m0=float(m0), h0_min=float(h0_min))


def _ret(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _positive(h, name="h"):
    h = np.asarray(h, dtype=float)
    if np.any(~(h > 0)):
        raise DomainError(f"{name} must be positive")
    return h


def kappa(h, law: GammaLaw):
    """K(h) = int_1^h s**((gamma-3)/2) ds."""
    h = _positive(h)
    g = law.gamma
    if g == 1.0:
        return _ret(np.log(h))
    # expm1 keeps full relative accuracy for h near 1
    return _ret(2.0 / (g - 1.0) * np.expm1(0.5 * (g - 1.0) * np.log(h)))


def vartheta(z, law: GammaLaw):
    """Inverse of :func:`kappa`."""
    z = np.asarray(z, dtype=float)
    g = law.gamma
    if g == 1.0:
        return _ret(np.exp(z))
    base = 0.5 * (g - 1.0) * z + 1.0
    if np.any(~(base > 0)):
        raise DomainError("argument at or below the vacuum boundary -2/(gamma-1)")
    return _ret(base ** (2.0 / (g - 1.0)))


def vacuum_boundary(law: GammaLaw) -> float:
    """Infimum of admissible arguments of :func:`vartheta`."""
    return -math.inf if law.gamma == 1.0 else -2.0 / (law.gamma - 1.0)


def energy_density(h, law: GammaLaw):
    """Potential energy Q(h) = (1/gamma) int_1^h (s**(gamma-2) - s**-2) ds."""
    h = _positive(h)
    g = law.gamma
    if g == 1.0:
        q = np.log(h) + 1.0 / h - 1.0
    elif g == 2.0:
        q = (h - 1.0) ** 2 / (2.0 * h)
    else:
        lh = np.log(h)
        q = np.expm1((g - 1.0) * lh) / (g * (g - 1.0)) + np.expm1(-lh) / g
    return _ret(np.maximum(q, 0.0))


def zeta(beta, law: GammaLaw):
    """(1/gamma**2) [(beta+1)**(-2/gamma) + (beta+1)**(-2/gamma-1)]."""
    b1 = np.asarray(beta, dtype=float) + 1.0
    if np.any(~(b1 > 0)):
        raise DomainError("beta must exceed -1")
    g = law.gamma
    p = -2.0 / g
    return _ret((b1 ** p + b1 ** (p - 1.0)) / g ** 2)


def f_gamma(alpha, law: GammaLaw, bound_constant: float = PRINTED_CUBE_CONSTANT):
    """The increasing map whose inverse bounds sup(h**(gamma/2) - 1).

    With the default ``bound_constant`` this is the printed formula
    16/(3 g^3) a^3/(a+1)^3 {(a+1)^(3-2/g) + (a+1)^(2-2/g)}. A different
    constant ``c`` in the cubic sup bound rescales it by ``0.75 / c``.
    """
    a = np.asarray(alpha, dtype=float)
    if np.any(~(a > 0)):
        raise DomainError("alpha must be positive")
    g = law.gamma
    a1 = a + 1.0
    e = 3.0 - 2.0 / g
    val = 16.0 / (3.0 * g ** 3) * a ** 3 / a1 ** 3 * (a1 ** e + a1 ** (e - 1.0))
    return _ret(val * (PRINTED_CUBE_CONSTANT / bound_constant))


def f_gamma_inv(y, law: GammaLaw, tol: float = 1e-12,
                bound_constant: float = PRINTED_CUBE_CONSTANT) -> float:
    """Invert :func:`f_gamma` by bracket doubling and bisection.

    ``y == 0`` maps to 0 (continuous extension).
    """
    y = float(y)
    if y == 0.0:
        return 0.0
    if not y > 0:
        raise DomainError("f_gamma_inv needs y > 0")
    if not tol > 0:
        raise DomainError("tol must be positive")

    def f(a):
        return f_gamma(a, law, bound_constant)

    lo, hi = 0.0, 1.0
    while f(hi) <= y:
        lo, hi = hi, 2.0 * hi
    ftol = tol * max(1.0, y)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm - y) <= ftol and hi - lo <= tol * hi:
            return mid
        if fm > y:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 4 * np.finfo(float).eps * hi:
            break
    return 0.5 * (lo + hi)


def theta_sharp(t, m0: float, law: GammaLaw):
    """Upper bound vartheta(M0 e^t) on the height."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be nonnegative")
    return vartheta(m0 * np.exp(t), law)


def theta_flat(t, h0_min: float, w0_sharp: float):
    """Lower bound [h0_min**-1/2 + t W0 / 2]**-2 on the height."""
    if not h0_min > 0:
        raise DomainError("h0_min must be positive")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be nonnegative")
    return _ret((1.0 / math.sqrt(h0_min) + 0.5 * t * w0_sharp) ** -2)


def prop_b1_margin(alpha, beta, law: GammaLaw):
    """q = Q((alpha+1)**(2/gamma)) - alpha**2 zeta(beta).

    Nonnegative whenever -1 < alpha <= beta and beta >= 0; for beta < 0 the
    monotonicity argument has no anchor at alpha = 0 and q can be negative.
    """
    a = np.asarray(alpha, dtype=float)
    b = np.asarray(beta, dtype=float)
    if np.any(~(a > -1.0)) or np.any(a > b):
        raise DomainError("need -1 < alpha <= beta")
    q = energy_density((a + 1.0) ** (2.0 / law.gamma), law)
    return _ret(q - a ** 2 * zeta(b, law))


def cube_sup_bound(g: Field1D, constant: float = VALID_CUBE_CONSTANT):
    """Both sides of sup|g|^3 <= constant * ||g||_2^2 * sup|g'| on a grid.

    Returns ``(lhs, rhs)``; the L2 norm uses the trapezoid rule and the
    derivative uses centered differences (one-sided at the window ends).
    """
    vals = np.asarray(g.values, dtype=float)
    if vals.size < 3:
        raise DomainError("need at least 3 samples")
    scale = np.max(np.abs(vals))
    if scale > 0 and max(abs(vals[0]), abs(vals[-1])) > 1e-12 * scale:
        raise DomainError("g must vanish at the window edges")
    lhs = float(scale ** 3)
    l2sq = float(g.dxi * (np.sum(vals ** 2) - 0.5 * (vals[0] ** 2 + vals[-1] ** 2)))
    dmax = float(np.max(np.abs(np.gradient(vals, g.dxi, edge_order=2))))
    return lhs, constant * l2sq * dmax
