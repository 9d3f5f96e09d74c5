"""Experiment orchestration: single runs, manifests, output files, sweeps.

All files are written atomically (temp file + rename).  A manifest is
written exactly once per run; identical configs produce byte-identical CSV
outputs (the manifest's wall-time field is the one excluded quantity).
"""

import hashlib
import json
import math
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .clifford import RUN_CSV_HEADER as CLIFFORD_CSV_HEADER
from .clifford import run_clifford, soliton_fit
from .config import ExperimentConfig, parse_config, serialize_config
from .diagnostics import DIAGNOSTICS_CSV_HEADER
from .errors import EquiflowError, InvariantViolation
from .frames import random_boundary_frame, verify_projection_identities
from .geometry import write_curve_csv
from .lawlor import RUN_CSV_HEADER as LAWLOR_CSV_HEADER
from .lawlor import run_lawlor
from .render import render_curve_svg
from .verification import convergence_ladder

WORKERS_ENV = "LMCF_WORKERS"


def atomic_write_text(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_rows_csv(path, header, rows):
    lines = [header]
    keys = header.split(",")
    for row in rows:
        lines.append(",".join("%.12e" % row[k] for k in keys))
    atomic_write_text(path, "\n".join(lines) + "\n")


def config_hash(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(serialize_config(cfg).encode()).hexdigest()


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV, "").strip()
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _write_snapshots(outdir, curves, thetas, kappas, emit_svg, boundary):
    for k, curve in enumerate(curves):
        pth = outdir / f"curve_{k:04d}.csv"
        tmp = pth.with_suffix(".csv.tmp")
        write_curve_csv(tmp, curve, theta=thetas[k],
                        kappa=kappas[k] if kappas is not None else None)
        os.replace(tmp, pth)
        if emit_svg:
            render_curve_svg(outdir / f"curve_{k:04d}.svg", curve, boundary)


def _lawlor_scenario(cfg: ExperimentConfig, outdir: Path):
    run = run_lawlor(cfg.lawlor, cfg.output_times)
    _write_snapshots(outdir, run.curves, run.thetas, run.kappas,
                     cfg.emit_svg, "lawlor")
    _write_rows_csv(outdir / "run.csv", LAWLOR_CSV_HEADER, run.rows)
    atomic_write_text(outdir / "diagnostics.csv", DIAGNOSTICS_CSV_HEADER + "\n" +
                      "\n".join(r.to_csv_row() for r in run.records) + "\n")
    final = {
        "target_v_inf": run.target,
        "final_sup_dev": run.final_sup_dev,
        "bc_residual_max": run.bc_residual_max,
        "steps": run.steps,
        "int_cos_theta_drift": abs(run.rows[-1]["int_cos_theta"]
                                   - run.rows[0]["int_cos_theta"])
        / abs(run.rows[0]["int_cos_theta"]),
    }
    return run.termination, final


def _clifford_scenario(cfg: ExperimentConfig, outdir: Path):
    run = run_clifford(cfg.clifford, cfg.output_times)
    kappas = None
    _write_snapshots(outdir, run.curves, run.thetas, kappas,
                     cfg.emit_svg, "clifford")
    _write_rows_csv(outdir / "run.csv", CLIFFORD_CSV_HEADER, run.rows)
    atomic_write_text(outdir / "diagnostics.csv", DIAGNOSTICS_CSV_HEADER + "\n" +
                      "\n".join(r.to_csv_row() for r in run.records) + "\n")
    final = {
        "final_phi_dev": run.final_phi_dev,
        "bc_residual_max": run.bc_residual_max,
        "steps": run.steps,
    }
    times = np.asarray(run.times)
    if len(times) >= 4 and cfg.clifford.mode == "rescaled":
        t_hi = float(times[-1])
        window = (t_hi / 2.0, t_hi)
        sel = [(t, s) for t, s in zip(run.times, run.states)
               if window[0] <= t <= window[1]]
        if len(sel) >= 3:
            fit = soliton_fit([p[0] for p in sel], [p[1] for p in sel])
            final.update(omega_fit=fit.omega, omega_spread=fit.omega_spread,
                         fit_residual=fit.residual)
    return run.termination, final


def _frame_check_scenario(cfg: ExperimentConfig, outdir: Path):
    fc = cfg.frame_check
    rng = np.random.default_rng(fc.seed)
    worst = 0.0
    lines = []
    for k in range(fc.trials):
        frame = random_boundary_frame(fc.n, fc.alpha, rng)
        res = verify_projection_identities(frame)
        worst = max(worst, max(res.values()))
        lines.append(json.dumps({"seed": fc.seed, "trial": k,
                                 "residuals": res}, sort_keys=True))
    atomic_write_text(outdir / "residuals.jsonl", "\n".join(lines) + "\n")
    return "completed", {"max_residual": worst, "trials": fc.trials}


def _convergence_scenario(cfg: ExperimentConfig, outdir: Path):
    cv = cfg.convergence
    errors, orders = convergence_ladder(cv.problem, cv.grids, cv.t_final, cv.scheme)
    lines = ["n,error,order"]
    for k, n in enumerate(cv.grids):
        order = orders[k - 1] if k > 0 else float("nan")
        lines.append(f"{n},%.12e,%.12e" % (errors[k], order))
    atomic_write_text(outdir / "orders.csv", "\n".join(lines) + "\n")
    return "completed", {"errors": [float(e) for e in errors],
                         "orders": [float(o) for o in orders]}


_SCENARIO_IMPL = {
    "lawlor": _lawlor_scenario,
    "clifford": _clifford_scenario,
    "frame_check": _frame_check_scenario,
    "convergence": _convergence_scenario,
}


def run_experiment(cfg: ExperimentConfig, output_dir=None) -> dict:
    """Execute one experiment; returns the manifest (also written to
    manifest.json).  Typed flow errors are recorded in the manifest and
    re-raised for exit-code mapping."""
    outdir = Path(output_dir if output_dir is not None else cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "scenario": cfg.scenario,
        "config_hash": config_hash(cfg),
        "tool_version": __version__,
        "termination": None,
        "final": {},
        "error": None,
        "wall_time_s": None,
    }
    t0 = time.perf_counter()
    try:
        termination, final = _SCENARIO_IMPL[cfg.scenario](cfg, outdir)
        manifest["termination"] = termination
        manifest["final"] = final
    except EquiflowError as exc:
        manifest["termination"] = "error"
        manifest["error"] = {"type": type(exc).__name__, "message": str(exc)}
        manifest["wall_time_s"] = time.perf_counter() - t0
        atomic_write_text(outdir / "manifest.json",
                          json.dumps(manifest, sort_keys=True, indent=2) + "\n")
        raise
    manifest["wall_time_s"] = time.perf_counter() - t0
    atomic_write_text(outdir / "manifest.json",
                      json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return manifest


def set_parameter(cfg: ExperimentConfig, dotted: str, value) -> ExperimentConfig:
    """Return a copy of cfg with `section.key` replaced (validated)."""
    section, _, key = dotted.partition(".")
    if not key:
        raise InvariantViolation(f"parameter {dotted!r} must be section.key")
    try:
        if section == "experiment":
            return replace(cfg, **{key: value})
        if section == "stepper":
            flow = cfg.lawlor if cfg.scenario == "lawlor" else cfg.clifford
            if flow is None:
                raise InvariantViolation("no stepper to address in this scenario")
            new_flow = replace(flow, stepper=replace(flow.stepper, **{key: value}))
            return replace(cfg, **{cfg.scenario: new_flow})
        sub = getattr(cfg, section, None)
        if sub is None:
            raise InvariantViolation(f"section {section!r} not active in scenario "
                                     f"{cfg.scenario!r}")
        return replace(cfg, **{section: replace(sub, **{key: value})})
    except TypeError as exc:
        raise InvariantViolation(f"unknown key {dotted!r}") from exc
    except ValueError as exc:
        raise InvariantViolation(f"{dotted} = {value!r}: {exc}") from exc


def _sweep_worker(args):
    text, dotted, value, outdir = args
    cfg = parse_config(text)
    try:
        cfg = set_parameter(cfg, dotted, value)
        manifest = run_experiment(cfg, output_dir=outdir)
        return {"value": value, "status": "ok",
                "termination": manifest["termination"],
                "final": manifest["final"], "error": ""}
    except EquiflowError as exc:
        return {"value": value, "status": "failed", "termination": "error",
                "final": {}, "error": f"{type(exc).__name__}: {exc}"}


def sweep(cfg: ExperimentConfig, dotted: str, values, output_dir=None,
          workers=None) -> list[dict]:
    """Independent runs over values of one parameter, on a bounded worker
    pool; per-run failures are isolated and marked in the summary."""
    base = Path(output_dir if output_dir is not None else cfg.output_dir)
    base.mkdir(parents=True, exist_ok=True)
    text = serialize_config(cfg)
    jobs = [(text, dotted, v, str(base / f"{dotted.replace('.', '_')}_{v:g}"))
            for v in values]
    n_workers = workers if workers is not None else default_workers()
    if not jobs:
        rows = []
    elif n_workers <= 1 or len(jobs) == 1:
        rows = [_sweep_worker(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(n_workers, len(jobs))) as pool:
            rows = list(pool.map(_sweep_worker, jobs))
    final_keys = sorted({k for r in rows for k in r["final"]
                         if isinstance(r["final"][k], (int, float))})
    header = ["param", "value", "status", "termination", "error"] + final_keys
    lines = [",".join(header)]
    for r in rows:
        cells = [dotted, "%.12e" % r["value"], r["status"], r["termination"],
                 r["error"].replace(",", ";")]
        for k in final_keys:
            v = r["final"].get(k)
            cells.append("%.12e" % v if isinstance(v, (int, float)) else "")
        lines.append(",".join(cells))
    atomic_write_text(base / "summary.csv", "\n".join(lines) + "\n")
    return rows
