import csv
import json
import math

import numpy as np
import pytest

from ptfriction import sweep
from ptfriction.params import DimensionlessConfig, SweepSpec
from ptfriction.quantum import PropagationError

FAST = dict(n_max=8, n_steps=1000, record_stride=10, n_ran=4, n_steps_classical=2000,
            record_stride_classical=20, seed=11)


def spec(kind="lambda-sweep", grid=(0.5, 1.0), formalisms=("quantum", "classical"), **kw):
    base = DimensionlessConfig(eta=kw.pop("eta", 2.5), lambda_bar=1.0, **{**FAST, **kw})
    return SweepSpec(kind, grid, base, formalisms)


@pytest.fixture(scope="module")
def small_result():
    return sweep.run_sweep(spec(), workers=1, traj=True)


def test_fmt():
    assert sweep.fmt(1.0 / 3.0) == "0.333333333"
    assert sweep.fmt(None) == "" and sweep.fmt(float("nan")) == ""
    assert sweep.fmt(123456789012.0) == "1.23456789e+11"


def test_rows_and_ranges(small_result):
    rows = small_result.points
    assert [(r["swept_value"], r["formalism"]) for r in rows] == [
        (0.5, "quantum"), (0.5, "classical"), (1.0, "quantum"), (1.0, "classical")]
    for r in rows:
        assert r["status"] == "ok"
        assert r["regime"] == "stick-slip"
        assert r["F_max_over_F0"] > 0
        if r["formalism"] == "quantum":
            assert 0.0 <= r["P0_min"] <= 1.0 and 0.0 <= r["SL_max"] <= 1.0
        else:
            assert r["P0_min"] is None
    assert small_result.failed_fraction == 0.0


def test_csv_round_trip(small_result, tmp_path):
    paths = sweep.emit(small_result, tmp_path, stem="s")
    back = sweep.read_csv(tmp_path / "s.csv")
    assert len(back) == len(small_result.points)
    for a, b in zip(small_result.points, back):
        assert b["swept_param"] == "lambda_bar"
        for key in ("swept_value", "F_max_over_F0", "P0_min", "SL_max"):
            if a[key] is None:
                assert b[key] is None
            else:
                assert b[key] == pytest.approx(a[key], rel=1e-8)
    header = (tmp_path / "s.csv").read_text().splitlines()[0]
    assert header == ",".join(sweep.CSV_HEADER)
    doc = json.loads((tmp_path / "s.json").read_text())
    assert len(doc["points"]) == 4 and doc["meta"]["seed"] == 11
    traj = [p for p in paths if "_traj_" in str(p)]
    assert len(traj) == 4
    with open(traj[0]) as fh:
        assert next(csv.reader(fh)) == list(sweep.TRAJ_HEADER)


def test_empty_sweep(tmp_path):
    res = sweep.run_sweep(spec(grid=()), workers=1)
    sweep.emit(res, tmp_path)
    assert (tmp_path / "sweep.csv").read_text() == ",".join(sweep.CSV_HEADER) + "\n"
    assert json.loads((tmp_path / "sweep.json").read_text())["points"] == []
    assert res.failed_fraction == 0.0


def test_deterministic_and_parallel(small_result):
    again = sweep.run_sweep(spec(), workers=1, traj=True)
    par = sweep.run_sweep(spec(), workers=2, traj=True)
    text = sweep.csv_text(small_result)
    assert sweep.csv_text(again) == text
    assert sweep.csv_text(par) == text
    for key, arr in small_result.trajectories.items():
        np.testing.assert_array_equal(arr, par.trajectories[key])


def test_engine_failure_marks_row(monkeypatch):
    def boom(cfg, **kw):
        raise PropagationError("positivity", "forced")

    monkeypatch.setattr(sweep, "run_quantum", boom)
    res = sweep.run_sweep(spec(formalisms=("quantum",)), workers=1)
    assert all(r["status"] == "failed: positivity" for r in res.points)
    assert all(r["F_max_over_F0"] is None for r in res.points)
    assert res.failed_fraction == 1.0
    line = sweep.csv_text(res).splitlines()[1]
    assert line.endswith(",,,stick-slip,failed: positivity")


def test_invalid_grid_point_recorded():
    # theta must be non-negative, so the first point fails at expansion
    res = sweep.run_sweep(spec(kind="temperature-sweep", grid=(-1.0, 0.0),
                               formalisms=("classical",)), workers=1)
    assert [r["status"] for r in res.points] == ["failed: config", "ok"]
    assert res.failed_fraction == 0.5


def test_resolve_workers(monkeypatch):
    monkeypatch.delenv("PT_FRICTION_WORKERS", raising=False)
    assert sweep.resolve_workers() == 1
    monkeypatch.setenv("PT_FRICTION_WORKERS", "3")
    assert sweep.resolve_workers() == 3
    assert sweep.resolve_workers(2) == 2
    with pytest.raises(ValueError):
        sweep.resolve_workers(0)


def test_fixed_u0_sweep_configs():
    res = sweep.run_sweep(spec(kind="eta-sweep-fixed-u0", grid=(0.5, 2.5), formalisms=("classical",)),
                          workers=1)
    assert [r["regime"] for r in res.points] == ["single-well", "stick-slip"]
    lz = res.points[1]["diagnostics"]["oracle"]["lz_threshold"]
    assert math.isfinite(lz)
