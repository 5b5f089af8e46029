import csv

import pytest

from entropy_pf.cli import main

SMALL = """
[domain]
n = 16
[time]
T = 0.02
dt = 0.005
[source]
kind = singular
R1 = 0.5
[ic]
theta0 = sine_bump 1.0 1.3
chi0 = sine_bump 0.1 0.9
[scheme]
eps = 0.01
[output]
stride = 2
"""


@pytest.fixture
def cfg(tmp_path):
    p = tmp_path / "small.cfg"
    p.write_text(SMALL)
    return p


def test_run_writes_artifacts(cfg, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", str(cfg), "--outdir", str(out), "-q"]) == 0
    run_dir = out / "small"
    for name in ("snapshots.csv", "timeseries.csv", "norms.csv", "report.txt", "resolved.cfg"):
        assert (run_dir / name).is_file()
    with open(run_dir / "snapshots.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "x", "theta", "chi", "xi"]
    assert len(rows) == 1 + 3 * 18
    assert "run.completed = true" in (run_dir / "report.txt").read_text()
    assert capsys.readouterr().out == ""


def test_plot_is_reproducible(cfg, tmp_path):
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--outdir", str(out), "--run-id", "a", "--plot", "-q"]) == 0
    first = {p.name: p.read_bytes() for p in (out / "a" / "plots").iterdir()}
    assert set(first) == {"theta.svg", "chi.svg", "extrema.svg", "norms.svg"}
    assert main(["plot", str(out / "a")]) == 0
    second = {p.name: p.read_bytes() for p in (out / "a" / "plots").iterdir()}
    assert first == second


def test_with_oracle(cfg, tmp_path):
    out = tmp_path / "out"
    assert main(["run", str(cfg), "--outdir", str(out), "--with-oracle", "-q"]) == 0
    text = (out / "small" / "report.txt").read_text()
    assert "oracle.first_step_gap_theta" in text


def test_validate(cfg, tmp_path, capsys):
    assert main(["validate", str(cfg)]) == 0
    assert "valid" in capsys.readouterr().out
    bad = tmp_path / "bad.cfg"
    bad.write_text(SMALL + "[bounds]\ntheta_star_low = 1.5\n")
    assert main(["validate", str(bad)]) == 2
    assert "temperature_window" in capsys.readouterr().out


def test_exit_codes(tmp_path, capsys):
    unknown = tmp_path / "unknown.cfg"
    unknown.write_text("[scheme]\nepsilon = 0.1\n")
    assert main(["run", str(unknown)]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.cfg")]) == 5
    failing = tmp_path / "failing.cfg"
    failing.write_text(SMALL.replace("eps = 0.01", "eps = 0.01\nnewton_tol = 1e-15\nnewton_max = 1"))
    assert main(["run", str(failing), "--outdir", str(tmp_path / "o"), "-q"]) == 3


def test_shipped_demo_name(capsys):
    assert main(["validate", "demo_cold"]) == 0


def test_sweep(cfg, tmp_path, capsys):
    out = tmp_path / "sw"
    assert main(["sweep", str(cfg), "--values", "0.1,0.01", "--outdir", str(out), "-q"]) == 0
    with open(out / "small_sweep_eps" / "sweep.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [float(r["eps"]) for r in rows] == [0.1, 0.01]
    d = [float(r["l2q_distance_to_half"]) for r in rows]
    assert d[1] < d[0]
    assert (out / "small_sweep_eps" / "eps_0.01" / "report.txt").is_file()
    assert main(["sweep", str(cfg), "--values", "x"]) == 2


def test_tabulate(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["tabulate-lneps", "--eps", "0.1", "--points", "3", "--r-min", "0", "--r-max", "2", "--output", str(out)]) == 0
    rows = list(csv.reader(open(out)))
    assert rows[0] == ["eps", "r", "ln_eps", "ln_eps_prime"]
    assert len(rows) == 4
    # r = 1 is solved by rho = 1, so ln_eps(1) = 0 and the slope is 1/(1 + eps)
    assert float(rows[2][2]) == pytest.approx(0.0, abs=1e-15)
    assert float(rows[2][3]) == pytest.approx(1 / 1.1, rel=1e-12)


def test_verify_single_suite(capsys):
    assert main(["verify", "--suite", "yosida"]) == 0
    assert "1/1 suites passed" in capsys.readouterr().out
