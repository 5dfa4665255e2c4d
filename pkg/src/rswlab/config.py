"""Experiment configuration: a TOML document with one level of sections."""
from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .fields import BUMP_KINDS
from .solver import SolverConfig

MODES = ("simulate", "threshold", "predict-bound", "compare-kg", "trace", "kernels",
         "props", "coordmaps", "sweep")
NEEDS_DATA = ("simulate", "threshold", "predict-bound", "compare-kg", "trace",
              "coordmaps", "sweep")
MIN_POINTS = 64


@dataclass(frozen=True)
class GridSpec:
    xi_min: float
    xi_max: float
    n: int


@dataclass(frozen=True)
class DataSpec:
    kind: str | None = None
    amplitude: float = 0.0
    width: float = 1.0
    center: float = 0.0
    exponent: int = 3
    file: str | None = None


@dataclass(frozen=True)
class TraceSpec:
    family: int = 1
    xi_start: float = 0.0


@dataclass(frozen=True)
class KernelSpec:
    name: str = "kappa"
    args: tuple = ()


@dataclass(frozen=True)
class SweepSpec:
    parameter: str = "data.amplitude"
    values: tuple = ()
    mode: str = "simulate"
    workers: int = 1


@dataclass(frozen=True)
class ExperimentConfig:
    gamma: float
    mode: str
    grid: GridSpec | None = None
    data: DataSpec | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    output_dir: str = "out"
    seed: int = 0
    save_snapshots: bool = False
    bound_constant: float = 0.75
    trace: TraceSpec = field(default_factory=TraceSpec)
    kernel: KernelSpec = field(default_factory=KernelSpec)
    sweep: SweepSpec = field(default_factory=SweepSpec)


_TOP_KEYS = {"gamma", "mode", "output_dir", "seed", "save_snapshots", "bound_constant"}
_SECTIONS = {"grid": GridSpec, "data": DataSpec, "solver": SolverConfig,
             "trace": TraceSpec, "kernel": KernelSpec, "sweep": SweepSpec}


def _build_section(name: str, cls, table: Any):
    if not isinstance(table, dict):
        raise ConfigError(f"[{name}] must be a table")
    known = {f.name: f for f in dataclasses.fields(cls)}
    for key in table:
        if key not in known:
            raise ConfigError(f"unknown key '{name}.{key}'")
    kwargs = {}
    for key, val in table.items():
        if isinstance(val, list):
            val = tuple(val)
        kwargs[key] = val
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"[{name}]: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"[{name}]: {exc}") from exc


def _require(cond: bool, key: str, msg: str):
    if not cond:
        raise ConfigError(f"'{key}': {msg}")


def _number(doc: dict, key: str, default=None):
    val = doc.get(key, default)
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"'{key}' must be a number")
    return val


def from_dict(doc: dict) -> ExperimentConfig:
    """Validate an already-parsed document and fill defaults."""
    for key in doc:
        if key not in _TOP_KEYS and key not in _SECTIONS:
            raise ConfigError(f"unknown key '{key}'")
    for key in ("gamma", "mode"):
        if key not in doc:
            raise ConfigError(f"missing required key '{key}'")
    gamma = float(_number(doc, "gamma"))
    _require(math.isfinite(gamma) and gamma >= 1.0, "gamma", "must be >= 1")
    mode = doc["mode"]
    _require(mode in MODES, "mode", f"must be one of {MODES}")
    sections = {}
    for name, cls in _SECTIONS.items():
        if name in doc:
            sections[name] = _build_section(name, cls, doc[name])
    grid = sections.get("grid")
    data = sections.get("data")
    if mode in NEEDS_DATA:
        if grid is None:
            raise ConfigError("missing required key 'grid'")
        if data is None:
            raise ConfigError("missing required key 'data'")
    if grid is not None:
        _require(isinstance(grid.n, int) and not isinstance(grid.n, bool), "grid.n",
                 "must be an integer")
        _require(grid.n >= MIN_POINTS, "grid.n", f"must be >= {MIN_POINTS}")
        _require(grid.xi_max > grid.xi_min, "grid.xi_max", "must exceed grid.xi_min")
    if data is not None:
        if data.file is None:
            _require(data.kind in BUMP_KINDS, "data.kind", f"must be one of {BUMP_KINDS}")
            _require(data.width > 0, "data.width", "must be positive")
        else:
            _require(data.kind is None, "data.kind", "give either kind or file, not both")
    seed = doc.get("seed", 0)
    _require(isinstance(seed, int) and not isinstance(seed, bool), "seed", "must be an integer")
    save = doc.get("save_snapshots", False)
    _require(isinstance(save, bool), "save_snapshots", "must be true or false")
    bc = float(_number(doc, "bound_constant", 0.75))
    _require(bc > 0, "bound_constant", "must be positive")
    out_dir = doc.get("output_dir", "out")
    _require(isinstance(out_dir, str), "output_dir", "must be a string")
    sweep = sections.get("sweep", SweepSpec())
    if mode == "sweep":
        _require(len(sweep.values) > 0, "sweep.values", "must be a nonempty list")
        _require(sweep.mode in NEEDS_DATA and sweep.mode != "sweep", "sweep.mode",
                 "must be a single-run mode")
    trace = sections.get("trace", TraceSpec())
    _require(trace.family in (1, 2), "trace.family", "must be 1 or 2")
    kwargs = dict(gamma=gamma, mode=mode, grid=grid, data=data, output_dir=out_dir,
                  seed=seed, save_snapshots=save, bound_constant=bc, trace=trace,
                  kernel=sections.get("kernel", KernelSpec()), sweep=sweep)
    if "solver" in sections:
        kwargs["solver"] = sections["solver"]
    return ExperimentConfig(**kwargs)


def parse_config(text: str) -> ExperimentConfig:
    """Parse TOML text; duplicate keys, unknown keys and bad values raise ConfigError."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed document: {exc}") from exc
    return from_dict(doc)


def load_config(path: str | Path) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def to_dict(cfg: ExperimentConfig) -> dict:
    """Plain-data view (tuples become lists) for JSON summaries."""
    def clean(x):
        if isinstance(x, dict):
            return {k: clean(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [clean(v) for v in x]
        return x

    return clean(dataclasses.asdict(cfg))


def with_override(cfg: ExperimentConfig, dotted: str, value) -> ExperimentConfig:
    """Copy of ``cfg`` with one ``section.key`` (or top-level key) replaced."""
    doc = to_dict(cfg)
    parts = dotted.split(".")
    if len(parts) == 1:
        doc[parts[0]] = value
    elif len(parts) == 2 and isinstance(doc.get(parts[0]), dict):
        doc[parts[0]][parts[1]] = value
    else:
        raise ConfigError(f"cannot override '{dotted}'")
    for name in list(doc):
        if doc[name] is None:
            del doc[name]
    doc = {k: _strip_none(v) for k, v in doc.items()}
    return from_dict(doc)


def _strip_none(v):
    if isinstance(v, dict):
        return {k: x for k, x in v.items() if x is not None}
    return v
