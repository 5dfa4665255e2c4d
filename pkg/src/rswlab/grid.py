"""Uniform 1D grids and the finite-difference stencils used for diagnostics."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Field1D:
    """Uniformly sampled real function of the Lagrangian label.

    Sample ``i`` sits at ``xi_min + i * dxi``.
    """

    xi_min: float
    dxi: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 3:
            raise ValueError("Field1D needs a 1D array with at least 3 samples")
        if not self.dxi > 0:
            raise ValueError("dxi must be positive")
        if not np.all(np.isfinite(vals)):
            raise ValueError("Field1D values must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def xi(self) -> np.ndarray:
        return self.xi_min + self.dxi * np.arange(self.n)

    @property
    def xi_max(self) -> float:
        return self.xi_min + self.dxi * (self.n - 1)

    def with_values(self, values) -> "Field1D":
        return Field1D(self.xi_min, self.dxi, values)

    def same_grid(self, other: "Field1D") -> bool:
        return (self.n == other.n and self.xi_min == other.xi_min
                and self.dxi == other.dxi)


def make_grid(xi_min: float, xi_max: float, n: int) -> Field1D:
    """Zero field on ``n`` points spanning ``[xi_min, xi_max]`` inclusive."""
    if not xi_max > xi_min:
        raise ValueError("xi_max must exceed xi_min")
    return Field1D(float(xi_min), (xi_max - xi_min) / (n - 1), np.zeros(n))


def ddx(f: np.ndarray, dx: float) -> np.ndarray:
    """First derivative: 4th-order centered inside, 2nd order in the two edge rows."""
    f = np.asarray(f, dtype=float)
    out = np.empty_like(f)
    out[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * dx)
    out[1] = (f[2] - f[0]) / (2.0 * dx)
    out[-2] = (f[-1] - f[-3]) / (2.0 * dx)
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx)
    out[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * dx)
    return out


def d2dx2(f: np.ndarray, dx: float) -> np.ndarray:
    """Second derivative: 4th-order centered inside, 2nd order near the edges."""
    f = np.asarray(f, dtype=float)
    out = np.empty_like(f)
    out[2:-2] = (-f[:-4] + 16.0 * f[1:-3] - 30.0 * f[2:-2]
                 + 16.0 * f[3:-1] - f[4:]) / (12.0 * dx * dx)
    out[1] = (f[0] - 2.0 * f[1] + f[2]) / (dx * dx)
    out[-2] = (f[-3] - 2.0 * f[-2] + f[-1]) / (dx * dx)
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (dx * dx)
    out[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / (dx * dx)
    return out


def trapezoid(f: np.ndarray, dx: float) -> float:
    f = np.asarray(f, dtype=float)
    return float(dx * (f.sum() - 0.5 * (f[0] + f[-1])))
