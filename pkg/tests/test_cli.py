import json
import subprocess
import sys
from pathlib import Path

import pytest

from gamedyn import cli
from gamedyn.session_io import read_report, read_trajectories

FIXTURE = Path(__file__).parent / "fixtures" / "plays_a4.csv"


@pytest.mark.parametrize(
    "t, sx, sy",
    [("A", [2, 6], [2, 4]), ("B", [1], [4]), ("C", [1, 2, 5], [2, 4])],
)
def test_solve_survivors(tmp_path, t, sx, sy, capsys):
    assert cli.main(["solve", "--treatment", t, "--out", str(tmp_path)]) == 0
    res = json.loads((tmp_path / "solve.json").read_text())
    assert res["survivors_x"] == sx and res["survivors_y"] == sy
    assert "surv." in capsys.readouterr().out


def test_solve_all_and_equilibrium_column(tmp_path):
    assert cli.main(["solve", "--out", str(tmp_path)]) == 0
    res = json.loads((tmp_path / "solve.json").read_text())
    assert [r["treatment"] for r in res] == ["A", "B", "C"]
    assert res[0]["equilibrium"]["rho_x"][1] == pytest.approx(2 / 3)
    assert res[0]["rounds"][0] == {"round": 1, "x": [1, 3, 5, 7], "y": [1, 3, 5, 6, 7, 8]}


def test_solve_unknown_treatment(capsys):
    assert cli.main(["solve", "--treatment", "Q"]) != 0
    assert "error" in capsys.readouterr().err


def test_simulate_short(tmp_path):
    out = tmp_path / "sim"
    assert cli.main(["simulate", "--treatment", "A", "--sessions", "1", "--rounds", "10", "--out", str(out)]) == 0
    lines = (out / "trajectories_A.csv").read_text().splitlines()
    assert len(lines) == 11
    man = json.loads((out / "manifest.json").read_text())
    assert man["cfg"] == {"lambda": 50.0, "dt": 0.02, "rounds": 10, "sessions": 1, "payoff_scale": 1.0, "master_seed": 0}


def test_simulate_defaults_full_size(tmp_path):
    assert cli.main(["simulate", "--treatment", "A", "--out", str(tmp_path)]) == 0
    ens = read_trajectories(tmp_path / "trajectories_A.csv")
    assert len(ens) == 12 and all(s.n_rounds == 1000 for s in ens)


def test_simulate_same_seed_identical(tmp_path):
    for d in ("a", "b"):
        cli.main(["simulate", "--treatment", "C", "--rounds", "50", "--sessions", "3", "--seed", "9", "--out", str(tmp_path / d)])
    assert (tmp_path / "a" / "trajectories_C.csv").read_bytes() == (tmp_path / "b" / "trajectories_C.csv").read_bytes()


def test_simulate_invalid_cfg(tmp_path, capsys):
    assert cli.main(["simulate", "--treatment", "A", "--dt", "0", "--out", str(tmp_path)]) == 2
    assert "dt" in capsys.readouterr().err


def test_env_out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    assert cli.main(["simulate", "--treatment", "B", "--rounds", "5", "--sessions", "1"]) == 0
    assert (tmp_path / "env" / "trajectories_B.csv").exists()


def _analysis_files(d: Path):
    return sorted(p.name for p in d.iterdir())


def test_analyze_plays_and_trajectories_have_same_shapes(tmp_path):
    plays_out = tmp_path / "plays"
    assert cli.main(["analyze", "--in", str(FIXTURE), "--treatment", "A", "--scale-windows", "--out-dir", str(plays_out)]) == 0
    sim = tmp_path / "sim"
    cli.main(["simulate", "--treatment", "A", "--rounds", "30", "--out", str(sim)])
    traj_out = tmp_path / "traj"
    assert cli.main(["analyze", "--in", str(sim / "trajectories_A.csv"), "--treatment", "A", "--scale-windows", "--out-dir", str(traj_out)]) == 0
    assert _analysis_files(plays_out) == _analysis_files(traj_out)
    for name in _analysis_files(plays_out):
        if name.endswith((".tsv", ".csv")):
            a = read_report(plays_out / name)
            b = read_report(traj_out / name)
            assert a.columns == b.columns
            if not name.startswith(("pulses", "crossovers", "consistency", "loops")):
                assert len(a.rows) == len(b.rows)
    pulses = read_report(plays_out / "pulses_A.tsv")
    assert ("A", "X_8", "X_2", "11-20", "0.0074", "17", "120") in pulses.rows


def test_analyze_cycle_top4(tmp_path):
    sim = tmp_path / "sim"
    cli.main(["simulate", "--treatment", "A", "--out", str(sim)])
    out = tmp_path / "an"
    assert cli.main(["analyze", "--in", str(sim / "trajectories_A.csv"), "--treatment", "A", "--measures", "cycle", "--out-dir", str(out)]) == 0
    rows = read_report(out / "spectrum_A.csv").rows
    top = sorted(rows, key=lambda r: -abs(float(r[3])))[:4]
    assert {int(r[0]) for r in top} == {25, 23, 71, 69}


def test_analyze_short_run_needs_window_flag(tmp_path, capsys):
    assert cli.main(["analyze", "--in", str(FIXTURE), "--treatment", "A", "--measures", "distribution", "--out-dir", str(tmp_path)]) == 2
    assert "scale_windows" in capsys.readouterr().err


def test_analyze_schema_mismatch(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("foo,bar\n1,2\n")
    assert cli.main(["analyze", "--in", str(bad), "--treatment", "A", "--out-dir", str(tmp_path / "o")]) == 2
    assert "header" in capsys.readouterr().err


def _tree(d: Path):
    return {str(p.relative_to(d)): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file() and p.name != "manifest.json"}


def test_report_short_run_and_replay(tmp_path):
    first = tmp_path / "r1"
    args = ["report", "--rounds", "120", "--sessions", "3", "--seed", "4", "--out-dir", str(first)]
    assert cli.main(args) == 0
    assert not (first / cli.INCOMPLETE).exists()
    man = json.loads((first / "manifest.json").read_text())
    assert man["cfg"]["master_seed"] == 4 and man["treatments"] == ["A", "B", "C"]
    for t in "ABC":
        assert (first / t / f"spectrum_{t}.csv").exists()
    assert set(man["outputs"]) == set(_tree(first))

    second = tmp_path / "r2"
    assert cli.main(["report", "--manifest", str(first / "manifest.json"), "--out-dir", str(second)]) == 0
    assert _tree(first) == _tree(second)


def test_report_failure_leaves_marker(tmp_path, monkeypatch, capsys):
    def boom(*a, **k):
        raise RuntimeError("stage failed")

    monkeypatch.setattr(cli, "run_report", boom)
    out = tmp_path / "r"
    assert cli.main(["report", "--out-dir", str(out)]) == 1
    assert "stage failed" in (out / cli.INCOMPLETE).read_text()
    assert not (out / "manifest.json").exists()


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "gamedyn.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip()
