"""Sweep orchestration and result emission."""

import csv
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .asymptotics import classify, oracle_table
from .classical import EnsembleError, run_ensemble
from .params import ConfigError, expand_sweep
from .quantum import PropagationError, run_quantum, summarize_first_period

log = logging.getLogger(__name__)

CSV_HEADER = ("swept_param", "swept_value", "formalism", "F_max_over_F0", "P0_min", "SL_max",
              "regime", "status")
TRAJ_HEADER = ("t_over_T", "x_over_a", "force_over_F0", "P0", "SL")
FAIL_FRACTION = 0.5


@dataclass
class SweepResult:
    swept_param: str
    points: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    trajectories: dict = field(default_factory=dict)

    @property
    def failed_fraction(self):
        """Fraction of grid points with at least one failed row."""
        bad, total = set(), set()
        for row in self.points:
            total.add(row["index"])
            if row["status"] != "ok":
                bad.add(row["index"])
        return len(bad) / len(total) if total else 0.0


def fmt(value):
    """Nine significant digits; missing values become empty fields."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".9g")
    return str(value)


def _row(cfg, formalism, value, index):
    return {
        "index": index,
        "swept_value": value,
        "formalism": formalism,
        "F_max_over_F0": None,
        "P0_min": None,
        "SL_max": None,
        "regime": classify(cfg.eta).regime,
        "status": "ok",
        "diagnostics": {"oracle": oracle_table(cfg.eta, cfg.lambda_bar, cfg.omega_t)},
    }


def run_point(cfg, formalisms=("quantum", "classical"), value=None, index=0, traj=False):
    """Rows (and optional trajectory arrays) for one parameter point.

    Engine failures mark the row failed and carry no numbers.
    """
    rows, trajs = [], {}
    if "quantum" in formalisms:
        row = _row(cfg, "quantum", value, index)
        try:
            qt = run_quantum(cfg)
            row.update(summarize_first_period(qt))
            row["F_max_over_F0"] = row.pop("F_max")
            row["diagnostics"].update(qt.diagnostics)
            if traj:
                trajs["quantum"] = np.column_stack([
                    qt.column("t_over_T"), qt.column("x_over_a"), qt.column("force"),
                    qt.column("P0"), qt.column("S_L"),
                ])
        except PropagationError as exc:
            row["status"] = f"failed: {exc.reason}"
            row["diagnostics"]["error"] = str(exc)
        rows.append(row)
    if "classical" in formalisms:
        row = _row(cfg, "classical", value, index)
        try:
            ens = run_ensemble(cfg)
            row["F_max_over_F0"] = ens.max_force
            row["diagnostics"].update(ens.diagnostics)
            row["diagnostics"]["slip_time"] = ens.slip_time
            row["diagnostics"]["seed"] = ens.seed_record
            if traj:
                nan = np.full_like(ens.t_over_T, np.nan)
                trajs["classical"] = np.column_stack([
                    ens.t_over_T, ens.mean_trajectory, ens.force_series, nan, nan,
                ])
        except EnsembleError as exc:
            row["status"] = "failed: ensemble"
            row["diagnostics"]["error"] = str(exc)
        rows.append(row)
    return rows, trajs


def _work(args):
    point, formalisms, traj = args
    if point.error is not None:
        return [{"index": point.index, "swept_value": point.value, "formalism": f,
                 "F_max_over_F0": None, "P0_min": None, "SL_max": None, "regime": "",
                 "status": "failed: config", "diagnostics": {"error": point.error}}
                for f in formalisms], {}
    return run_point(point.config, formalisms, point.value, point.index, traj)


def resolve_workers(workers=None):
    if workers is None:
        env = os.environ.get("PT_FRICTION_WORKERS")
        workers = int(env) if env else 1
    if workers < 1:
        raise ConfigError("worker count must be >= 1")
    return workers


def run_sweep(spec, workers=None, traj=False):
    """Execute every grid point; rows come back ordered by point index."""
    workers = resolve_workers(workers)
    points = expand_sweep(spec)
    jobs = [(p, spec.formalisms, traj) for p in points]
    start = time.perf_counter()
    if workers == 1 or len(jobs) <= 1:
        outputs = [_work(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_work, jobs))
    result = SweepResult(spec.swept_param)
    order = {f: i for i, f in enumerate(spec.formalisms)}
    for point, (rows, trajs) in zip(points, outputs):
        result.points.extend(sorted(rows, key=lambda r: order[r["formalism"]]))
        for formalism, arr in trajs.items():
            result.trajectories[(point.index, formalism)] = arr
    result.points.sort(key=lambda r: (r["swept_value"], order[r["formalism"]]))
    result.meta = {
        "kind": spec.kind,
        "grid": list(spec.grid),
        "formalisms": list(spec.formalisms),
        "config": spec.base.to_dict(),
        "seed": spec.base.seed,
        "version": __version__,
        "wall_time_s": time.perf_counter() - start,
        "workers": workers,
    }
    return result


def csv_text(result):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in result.points:
        w.writerow([result.swept_param, fmt(r["swept_value"]), r["formalism"],
                    fmt(r["F_max_over_F0"]), fmt(r["P0_min"]), fmt(r["SL_max"]),
                    r["regime"], r["status"]])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def emit(result, out_dir, stem="sweep"):
    """Write ``<stem>.csv``, ``<stem>.json`` and any trajectory CSVs.

    Returns the list of written paths; raises ``OSError`` when the directory
    is not writable.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    csv_path = os.path.join(out_dir, f"{stem}.csv")
    with open(csv_path, "w", newline="") as fh:
        fh.write(csv_text(result))
    paths.append(csv_path)
    doc = {"swept_param": result.swept_param, "meta": result.meta, "points": result.points}
    json_path = os.path.join(out_dir, f"{stem}.json")
    with open(json_path, "w") as fh:
        json.dump(_jsonable(doc), fh, indent=2, sort_keys=True)
    paths.append(json_path)
    for (index, formalism), arr in sorted(result.trajectories.items()):
        path = os.path.join(out_dir, f"{stem}_traj_{index:03d}_{formalism}.csv")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TRAJ_HEADER)
            for rec in arr:
                w.writerow([fmt(float(v)) for v in rec])
        paths.append(path)
    return paths


def read_csv(path):
    """Parse an emitted sweep CSV back into row dicts with floats."""
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            for key in ("swept_value", "F_max_over_F0", "P0_min", "SL_max"):
                rec[key] = float(rec[key]) if rec[key] else None
            rows.append(rec)
    return rows
