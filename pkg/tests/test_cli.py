import json
import os
import subprocess
import sys

import pytest

from ptfriction import cli

FAST = ["--set", "n_max=8", "--set", "n_steps=1000", "--set", "n_ran=3",
        "--set", "n_steps_classical=2000", "--set", "record_stride_classical=20"]

SWEEP_TEXT = """\
kind = lambda-sweep
grid = 0.5, 1.0
formalisms = quantum, classical
eta = 2.5
lambda_bar = 1.0
n_max = 8
n_steps = 1000
n_ran = 3
n_steps_classical = 2000
record_stride_classical = 20
"""


@pytest.fixture
def sweep_cfg(tmp_path):
    p = tmp_path / "sweep.cfg"
    p.write_text(SWEEP_TEXT)
    return p


def test_run_to_stdout(capsys):
    code = cli.main(["run", "--set", "eta=2.5", "--set", "lambda_bar=1.0", *FAST])
    out = capsys.readouterr().out.splitlines()
    assert code == 0
    assert out[0].startswith("swept_param,swept_value,formalism")
    assert len(out) == 3


def test_run_traj(tmp_path):
    code = cli.main(["run", "--set", "eta=0.5", "--set", "lambda_bar=1.0", "--formalism", "quantum",
                     "--traj", "--out", str(tmp_path), *FAST])
    assert code == 0
    assert (tmp_path / "point.csv").exists()
    assert (tmp_path / "point_traj_000_quantum.csv").exists()


def test_sweep_deterministic_serial_parallel(sweep_cfg, tmp_path, monkeypatch):
    assert cli.main(["sweep", "--config", str(sweep_cfg), "--out", str(tmp_path / "a"),
                     "--seed", "5"]) == 0
    monkeypatch.setenv("PT_FRICTION_WORKERS", "2")
    assert cli.main(["sweep", "--config", str(sweep_cfg), "--out", str(tmp_path / "b"),
                     "--seed", "5"]) == 0
    a = (tmp_path / "a" / "sweep.csv").read_bytes()
    assert a == (tmp_path / "b" / "sweep.csv").read_bytes()
    meta = json.loads((tmp_path / "b" / "sweep.json").read_text())["meta"]
    assert meta["workers"] == 2 and meta["seed"] == 5


def test_config_error_exit(tmp_path, capsys):
    assert cli.main(["run", "--set", "eta=-1", "--set", "lambda_bar=1"]) == cli.EXIT_CONFIG
    assert cli.main(["run", "--set", "eta"]) == cli.EXIT_CONFIG
    bad = tmp_path / "bad.cfg"
    bad.write_text("kind = lambda-sweep\ngrid = 1\nbogus = 3\n")
    assert cli.main(["sweep", "--config", str(bad)]) == cli.EXIT_CONFIG
    assert cli.main(["oracle", "--eta", "0"]) == cli.EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_io_error_exit(sweep_cfg, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code = cli.main(["sweep", "--config", str(sweep_cfg), "--out", str(blocker / "sub")])
    assert code == cli.EXIT_IO
    assert cli.main(["sweep", "--config", str(tmp_path / "missing.cfg")]) == cli.EXIT_IO


def test_failure_threshold_exit(tmp_path, monkeypatch):
    from ptfriction import sweep
    from ptfriction.quantum import PropagationError

    def boom(cfg, **kw):
        raise PropagationError("trace", "forced")

    monkeypatch.setattr(sweep, "run_quantum", boom)
    cfg = tmp_path / "q.cfg"
    cfg.write_text(SWEEP_TEXT.replace("quantum, classical", "quantum"))
    assert cli.main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "o")]) == cli.EXIT_FAILURES
    rows = (tmp_path / "o" / "sweep.csv").read_text().splitlines()
    assert all(r.endswith("failed: trace") for r in rows[1:])


def test_oracle_output(capsys):
    assert cli.main(["oracle", "--eta", "6.4", "--lambda-bar", "0.2"]) == 0
    table = json.loads(capsys.readouterr().out)
    assert table["regime"] == "deep-corrugation"
    assert table["lz_threshold"] == pytest.approx(0.3422, abs=1e-4)


def test_validate_subprocess():
    env = dict(os.environ)
    proc = subprocess.run([sys.executable, "-m", "ptfriction.cli", "validate"],
                          capture_output=True, text=True, env=env, timeout=300)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    lines = proc.stdout.splitlines()
    assert len(lines) == 7 and all(l.startswith("PASS") for l in lines)
