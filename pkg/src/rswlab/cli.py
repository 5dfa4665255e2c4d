"""Command-line entry point: ``rswlab <subcommand> [--config FILE] [--out DIR]``."""
from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import kernels as K
from .audits import run_audits
from .blowup import composed_trajectory, predicted_blowup_bound, trace_characteristic
from .config import ExperimentConfig, MODES, load_config, to_dict, with_override
from .coordmaps import (eulerian_residuals, inverse_defect, lagrange_to_euler,
                        sigma_flow, upsilon_flow)
from .errors import (BoundaryContact, ConfigError, DomainError, NoPredictionError,
                     NumericalFailure, PreconditionError, VacuumError)
from .fields import LagrangianState, make_bump_data, threshold_report
from .grid import make_grid
from .klein_gordon import cross_validate
from .serialize import (DIAGNOSTIC_COLUMNS, read_state_csv, write_csv, write_json,
                        write_snapshot)
from .solver import RunOutcome, run

EXIT_OK, EXIT_CONFIG, EXIT_VACUUM, EXIT_BOUNDARY, EXIT_NUMERICAL = 0, 2, 3, 4, 5
STATUS_EXIT = {"survived": EXIT_OK, "blowup": EXIT_OK, "vacuum": EXIT_VACUUM,
               "boundary-contact": EXIT_BOUNDARY, "numerical-failure": EXIT_NUMERICAL}
KERNEL_FUNCS = {
    "kappa": K.kappa, "vartheta": K.vartheta, "energy_density": K.energy_density,
    "zeta": K.zeta, "f_gamma": K.f_gamma, "f_gamma_inv": K.f_gamma_inv,
    "theta_sharp": K.theta_sharp, "theta_flat": K.theta_flat,
    "prop_b1_margin": K.prop_b1_margin,
}
#: number of leading positional arguments before the law argument
_LAW_POSITION = {"kappa": 1, "vartheta": 1, "energy_density": 1, "zeta": 1, "f_gamma": 1,
                 "f_gamma_inv": 1, "theta_sharp": 2, "prop_b1_margin": 2}


def initial_state(cfg: ExperimentConfig) -> LagrangianState:
    d = cfg.data
    if d.file is not None:
        return read_state_csv(d.file)
    g = cfg.grid
    return make_bump_data(d.kind, d.amplitude, d.width, make_grid(g.xi_min, g.xi_max, g.n),
                          center=d.center, exponent=d.exponent)


def _report_dict(rep) -> dict:
    out = dataclasses.asdict(rep)
    out["constants"] = dataclasses.asdict(rep.constants)
    return out


def _tolerances(cfg: ExperimentConfig) -> dict:
    return {"blowup_z_floor": cfg.solver.blowup_z_floor, "dt_floor": cfg.solver.dt_floor,
            "cfl": cfg.solver.cfl, "bound_constant": cfg.bound_constant,
            "support_level": 1e-10, "divergence_level": 1e8, "f_gamma_inv_tol": 1e-12}


def _comparison_series(state0, law, times, cfg) -> np.ndarray | None:
    try:
        traj = composed_trajectory(state0, law, float(times[-1]) + 1e-9,
                                   bound_constant=cfg.bound_constant)
    except (NoPredictionError, PreconditionError):
        return None
    return traj.m_at(times)


def write_diagnostics(path: Path, outcome: RunOutcome, state0, law, cfg):
    consts = threshold_report(state0, law, cfg.bound_constant).constants
    times = outcome.times
    m = _comparison_series(state0, law, times, cfg)
    rows = []
    for i, d in enumerate(outcome.diagnostics):
        with np.errstate(over="ignore"):
            ts = K.theta_sharp(d.t, consts.m0, law) if math.isfinite(consts.m0) else None
        tf = K.theta_flat(d.t, consts.h0_min, consts.w0_sharp) if math.isfinite(
            consts.w0_sharp) else None
        mc = None if m is None or not np.isfinite(m[i]) else m[i]
        rows.append((d.t, d.energy, d.min_z, d.max_z, d.min_h, d.max_h, d.max_pv_drift,
                     d.max_abs_r, d.support_halfwidth, ts, tf, consts.w0_sharp, mc))
    write_csv(path, DIAGNOSTIC_COLUMNS, rows)


def _simulate(cfg, law, state0, out: Path, log) -> int:
    solver = dataclasses.replace(cfg.solver, keep_snapshots=cfg.save_snapshots
                                 or cfg.solver.keep_snapshots)
    rep = threshold_report(state0, law, cfg.bound_constant)
    try:
        bound = predicted_blowup_bound(state0, law, bound_constant=cfg.bound_constant)
    except (NoPredictionError, PreconditionError):
        bound = None
    outcome = run(state0, law, solver)
    outcome.predicted_bound = bound
    write_diagnostics(out / "diagnostics.csv", outcome, state0, law, cfg)
    if cfg.save_snapshots:
        for k, s in enumerate(outcome.snapshots):
            write_snapshot(out / "snapshots" / f"snap_{k:05d}.csv", s, law)
    write_json(out / "summary.json", {
        "mode": "simulate", "config": to_dict(cfg), "threshold_report": _report_dict(rep),
        "status": outcome.status, "t_final": outcome.t_final,
        "blowup_time": outcome.t_final if outcome.status == "blowup" else None,
        "blowup_location": outcome.blowup_location, "predicted_bound": bound,
        "effective_z_floor": outcome.z_floor, "message": outcome.message,
        "tolerances": _tolerances(cfg)})
    log(f"status {outcome.status} at t = {outcome.t_final:.6g}"
        + (f"; predicted bound {bound:.6g}" if bound is not None else ""))
    return STATUS_EXIT[outcome.status]


def _threshold(cfg, law, state0, out: Path, log) -> int:
    rep = threshold_report(state0, law, cfg.bound_constant)
    write_json(out / "summary.json", {"mode": "threshold", "config": to_dict(cfg),
                                      "threshold_report": _report_dict(rep),
                                      "tolerances": _tolerances(cfg)})
    log(f"inf Z0 = {rep.inf_z0:.6g}; large-gradient bar {rep.thm11_threshold:.6g} "
        f"({rep.thm11_satisfied}); small-gradient bar {rep.thm12_threshold:.6g} "
        f"({rep.thm12_satisfied})")
    return EXIT_OK


def _predict(cfg, law, state0, out: Path, log) -> int:
    rep = threshold_report(state0, law, cfg.bound_constant)
    try:
        bound = predicted_blowup_bound(state0, law, bound_constant=cfg.bound_constant)
        traj = composed_trajectory(state0, law, bound + 1.0, bound_constant=cfg.bound_constant)
        write_csv(out / "comparison.csv", ("t", "m"), zip(traj.times, traj.m_values))
        msg = None
    except NoPredictionError as exc:
        bound, msg = None, str(exc)
    write_json(out / "summary.json", {"mode": "predict-bound", "config": to_dict(cfg),
                                      "threshold_report": _report_dict(rep),
                                      "predicted_bound": bound, "message": msg,
                                      "tolerances": _tolerances(cfg)})
    log(f"predicted bound: {bound}" if bound is not None else f"no prediction: {msg}")
    return EXIT_OK


def _compare_kg(cfg, law, state0, out: Path, log) -> int:
    cv = cross_validate(state0, law, cfg.solver)
    write_csv(out / "discrepancy.csv", ("t", "dh", "du", "dv"),
              zip(cv.times, cv.dh, cv.du, cv.dv))
    write_json(out / "summary.json", {"mode": "compare-kg", "config": to_dict(cfg),
                                      "primitive_status": cv.primitive_status,
                                      "kg_status": cv.kg_status,
                                      "max_discrepancy": cv.max_discrepancy,
                                      "tolerances": _tolerances(cfg)})
    log(f"max discrepancy {cv.max_discrepancy:.3e}")
    return max(STATUS_EXIT[cv.primitive_status], STATUS_EXIT[cv.kg_status])


def _trace(cfg, law, state0, out: Path, log) -> int:
    outcome = run(state0, law, dataclasses.replace(cfg.solver, keep_snapshots=True))
    tr = trace_characteristic(outcome.snapshots, cfg.trace.family, cfg.trace.xi_start, law)
    res = np.concatenate(([np.nan], tr.residuals))
    write_csv(out / "trace.csv", ("t", "xi", "z", "residual"),
              zip(tr.times, tr.xi_positions, tr.z_along, res))
    write_json(out / "summary.json", {"mode": "trace", "config": to_dict(cfg),
                                      "status": outcome.status, "family": tr.family,
                                      "z_residual_max": tr.z_residual_max,
                                      "truncated": tr.truncated,
                                      "tolerances": _tolerances(cfg)})
    log(f"trace residual max {tr.z_residual_max:.3e} (truncated: {tr.truncated})")
    return STATUS_EXIT[outcome.status]


def _coordmaps(cfg, law, state0, out: Path, log) -> int:
    outcome = run(state0, law, dataclasses.replace(cfg.solver, keep_snapshots=True))
    ups = upsilon_flow(outcome.snapshots)
    eul = lagrange_to_euler(outcome.snapshots, ups)
    sig = sigma_flow(eul, state0.grid)
    inv = inverse_defect(ups, sig)
    payload = {"mode": "coordmaps", "config": to_dict(cfg), "status": outcome.status,
               "sigma_jacobian_defect": sig.jacobian_defect_max,
               "upsilon_jacobian_defect": ups.jacobian_defect_max,
               "inverse_defect": inv, "truncated": ups.truncated or sig.truncated,
               "tolerances": _tolerances(cfg)}
    if len(eul) >= 3:
        ts, rm, rx, ry = eulerian_residuals(eul, law)
        write_csv(out / "eulerian_residuals.csv", ("t", "mass", "momentum_x", "momentum_y"),
                  zip(ts, rm, rx, ry))
        payload["max_mass_residual"] = float(rm.max())
    write_json(out / "summary.json", payload)
    log(f"jacobian defects sigma {sig.jacobian_defect_max:.3e}, "
        f"upsilon {ups.jacobian_defect_max:.3e}; inverse defect {inv:.3e}")
    return STATUS_EXIT[outcome.status]


def _props(cfg, out: Path, log) -> int:
    lines = run_audits(seed=cfg.seed)
    for ln in lines:
        log(ln.render(), force=True)
    write_json(out / "summary.json", {"mode": "props", "seed": cfg.seed,
                                      "audits": [dataclasses.asdict(a) for a in lines]})
    return EXIT_OK


def evaluate_kernel(name: str, args, gamma: float) -> float:
    """Evaluate a kernel by name; the law is inserted after its leading arguments."""
    if name not in KERNEL_FUNCS:
        raise ConfigError(f"unknown kernel '{name}'; choose from {sorted(KERNEL_FUNCS)}")
    vals = [float(a) for a in args]
    if name in _LAW_POSITION:
        i = _LAW_POSITION[name]
        if len(vals) < i:
            raise ConfigError(f"kernel '{name}' needs {i} argument(s)")
        vals = vals[:i] + [K.GammaLaw(gamma)] + vals[i:]
    return float(KERNEL_FUNCS[name](*vals))


def _kernels(cfg, out: Path, log) -> int:
    val = evaluate_kernel(cfg.kernel.name, cfg.kernel.args, cfg.gamma)
    write_json(out / "summary.json", {"mode": "kernels", "kernel": cfg.kernel.name,
                                      "args": list(cfg.kernel.args), "gamma": cfg.gamma,
                                      "value": val})
    log("%.17g" % val, force=True)
    return EXIT_OK


def _sweep_one(args):
    cfg, out = args
    return run_experiment(cfg, out, quiet=True)


def _sweep(cfg, out: Path, log) -> int:
    sw = cfg.sweep
    jobs = []
    for i, val in enumerate(sw.values):
        sub = with_override(dataclasses.replace(cfg, mode=sw.mode), sw.parameter, val)
        jobs.append((sub, out / f"run_{i:03d}"))
    if sw.workers > 1:
        with ProcessPoolExecutor(max_workers=sw.workers) as pool:
            codes = list(pool.map(_sweep_one, jobs))
    else:
        codes = [_sweep_one(j) for j in jobs]
    write_csv(out / "sweep.csv", (sw.parameter, "directory", "exit_code"),
              [(float(v), str(j[1].name), str(c)) for v, j, c in zip(sw.values, jobs, codes)])
    log(f"sweep of {len(jobs)} runs; exit codes {codes}")
    return max(codes) if codes else EXIT_OK


def run_experiment(cfg: ExperimentConfig, out_dir: str | Path | None = None,
                   quiet: bool = False) -> int:
    """Run one configured experiment, write its artifacts and return the exit code."""
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    def log(msg, force=False):
        if force or not quiet:
            print(msg)

    try:
        if cfg.mode == "props":
            return _props(cfg, out, log)
        if cfg.mode == "kernels":
            return _kernels(cfg, out, log)
        if cfg.mode == "sweep":
            return _sweep(cfg, out, log)
        law = K.GammaLaw(cfg.gamma)
        state0 = initial_state(cfg)
        handler = {"simulate": _simulate, "threshold": _threshold,
                   "predict-bound": _predict, "compare-kg": _compare_kg,
                   "trace": _trace, "coordmaps": _coordmaps}[cfg.mode]
        return handler(cfg, law, state0, out, log)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except VacuumError as exc:
        print(f"vacuum: {exc}", file=sys.stderr)
        return EXIT_VACUUM
    except BoundaryContact as exc:
        print(f"boundary contact: {exc}", file=sys.stderr)
        return EXIT_BOUNDARY
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DomainError, PreconditionError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rswlab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for mode in MODES:
        if mode == "kernels":
            continue
        sp = sub.add_parser(mode)
        sp.add_argument("--config", required=True)
        sp.add_argument("--out")
        sp.add_argument("--quiet", action="store_true")
        sp.add_argument("--seed", type=int)
    kp = sub.add_parser("kernels", help="evaluate one kernel and print the value")
    kp.add_argument("name", nargs="?")
    kp.add_argument("args", nargs="*", type=float)
    kp.add_argument("--gamma", type=float, default=2.0)
    kp.add_argument("--config")
    kp.add_argument("--out")
    kp.add_argument("--quiet", action="store_true")
    kp.add_argument("--seed", type=int)
    return p


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        if ns.command == "kernels" and ns.config is None:
            if ns.name is None:
                raise ConfigError("give a kernel name or --config")
            print("%.17g" % evaluate_kernel(ns.name, ns.args, ns.gamma))
            return EXIT_OK
        cfg = load_config(ns.config)
        if cfg.mode != ns.command:
            cfg = with_override(cfg, "mode", ns.command)
        if ns.seed is not None:
            cfg = with_override(cfg, "seed", ns.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, ValueError, IndexError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run_experiment(cfg, ns.out, ns.quiet)


if __name__ == "__main__":
    sys.exit(main())
