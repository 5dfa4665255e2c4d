"""CSV and JSON writers with round-trip exact number formatting."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError
from .fields import LagrangianState, potential_vorticity, to_riemann, weighted_gradients
from .grid import Field1D
from .kernels import GammaLaw

SCHEMA_VERSION = 1
DIAGNOSTIC_COLUMNS = ("t", "energy", "min_z", "max_z", "min_h", "max_h", "max_pv_drift",
                      "max_abs_r", "support_halfwidth", "theta_sharp", "theta_flat",
                      "w0_sharp", "m_comparison")
SNAPSHOT_COLUMNS = ("xi", "h", "u", "v", "R1", "R2", "R3", "Z1", "Z2", "omega")


def fmt(x) -> str:
    """17 significant digits; empty string for missing values."""
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return "%.17g" % x


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isfinite(x):
            return float(fmt(x))
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def write_json(path: Path, payload: dict):
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"schema_version": SCHEMA_VERSION}
    doc.update(payload)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(doc), fh, indent=2, allow_nan=False)
        fh.write("\n")


def write_snapshot(path: Path, state: LagrangianState, law: GammaLaw):
    rs = to_riemann(state, law)
    z1, z2 = weighted_gradients(state, law)
    om = potential_vorticity(state)
    cols = (state.xi, state.h.values, state.u.values, state.v.values, rs.r1.values,
            rs.r2.values, rs.r3.values, z1.values, z2.values, om.values)
    write_csv(path, SNAPSHOT_COLUMNS, zip(*cols))


def read_state_csv(path: str | Path) -> LagrangianState:
    """t=0 data from a CSV with header ``xi,h,u,v`` on a uniform grid."""
    try:
        arr = np.genfromtxt(path, delimiter=",", names=True)
    except OSError as exc:
        raise ConfigError(f"cannot read data file: {exc}") from exc
    names = arr.dtype.names or ()
    for col in ("xi", "h", "u", "v"):
        if col not in names:
            raise ConfigError(f"data file lacks column '{col}'")
    xi = np.atleast_1d(arr["xi"])
    if xi.size < 3:
        raise ConfigError("data file needs at least 3 rows")
    d = np.diff(xi)
    if not np.allclose(d, d[0], rtol=1e-9, atol=0):
        raise ConfigError("data file grid is not uniform")
    grid = Field1D(float(xi[0]), float((xi[-1] - xi[0]) / (xi.size - 1)), np.zeros(xi.size))
    return LagrangianState.from_arrays(0.0, grid, arr["h"], arr["u"], arr["v"])
