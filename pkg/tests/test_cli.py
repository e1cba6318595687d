"""Command line contract tests: exit codes, CSV formats, reproducibility."""

import json

import numpy as np
import pytest

from microq import configs
from microq.cli import main
from microq.electron import CellParams, feeding_profile, predict_atp
from microq.quorum import logistic


def run(*argv):
    return main(list(argv))


def write(path, text):
    path.write_text(text)
    return str(path)


QUORUM_SMALL = """
[run]
model = quorum
horizon = 1.5
sample_period = 0.25

[quorum]
mode = closed
gamma = 3.5
"""

CAPACITY_SMALL = """
[run]
model = capacity

[capacity]
e_max = 30
alpha_min = 0.2
alpha_min_list = 0.1, 0.5, 0.9
"""

CELL_SMALL = """
[run]
model = cell
horizon = 100.0
sample_period = 10.0

[cell]
m_ch_cap = 6
n_atp_cap = 6
donor_peak = 4.0
donor_on = 5.0
donor_off = 80.0
donor_steps = 4
"""


class TestReproducibility:
    def test_quorum_rerun_is_byte_identical(self, tmp_path):
        cfg = write(tmp_path / "q.cfg", QUORUM_SMALL)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run("quorum", "simulate", "--config", cfg, "--seed", "7",
                   "--out", str(a)) == 0
        assert run("quorum", "simulate", "--config", cfg, "--seed", "7",
                   "--out", str(b)) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_manifest_digest_pins_effective_config(self, tmp_path):
        cfg = write(tmp_path / "q.cfg", QUORUM_SMALL)
        out = tmp_path / "a.csv"
        run("quorum", "simulate", "--config", cfg, "--seed", "7",
            "--out", str(out))
        m1 = json.loads((tmp_path / "a.csv.manifest.json").read_text())
        run("quorum", "simulate", "--config", cfg, "--seed", "7",
            "--out", str(out))
        m2 = json.loads((tmp_path / "a.csv.manifest.json").read_text())
        assert m1["config_digest"] == m2["config_digest"]
        assert m1["seed"] == 7 and m1["event_counts"] == m2["event_counts"]
        run("quorum", "simulate", "--config", cfg, "--seed", "7",
            "--out", str(out), "--set", "beta=19.0")
        m3 = json.loads((tmp_path / "a.csv.manifest.json").read_text())
        assert m3["config_digest"] != m1["config_digest"]

    def test_runs_fan_out_deterministically(self, tmp_path, monkeypatch):
        monkeypatch.setenv("MQ_THREADS", "1")
        cfg = write(tmp_path / "c.cfg", CELL_SMALL)
        out = tmp_path / "m.csv"
        assert run("cell", "simulate", "--config", cfg, "--runs", "3",
                   "--seed", "11", "--out", str(out)) == 0
        serial = [(tmp_path / f"m_r{r:03d}.csv").read_bytes() for r in range(3)]
        monkeypatch.setenv("MQ_THREADS", "3")
        assert run("cell", "simulate", "--config", cfg, "--runs", "3",
                   "--seed", "11", "--out", str(out)) == 0
        parallel = [(tmp_path / f"m_r{r:03d}.csv").read_bytes() for r in range(3)]
        assert serial == parallel
        manifest = json.loads((tmp_path / "m.csv.manifest.json").read_text())
        assert manifest["outputs"] == [f"m_r{r:03d}.csv" for r in range(3)]
        assert len(manifest["event_counts"]) == 3

    def test_shipped_configs_validate(self):
        for name in ("paper-closed.cfg", "paper-open.cfg", "figure6.cfg"):
            assert run("validate", "--config", configs.path(name)) == 0


class TestExitCodes:
    def test_missing_required_key_names_it(self, tmp_path, capsys):
        cfg = write(tmp_path / "bad.cfg",
                    QUORUM_SMALL.replace("gamma = 3.5\n", ""))
        assert run("quorum", "simulate", "--config", cfg) == 2
        assert "gamma" in capsys.readouterr().err

    def test_unknown_key_names_it(self, tmp_path, capsys):
        cfg = write(tmp_path / "q.cfg", QUORUM_SMALL)
        assert run("quorum", "simulate", "--config", cfg,
                   "--set", "banana=1") == 2
        assert "banana" in capsys.readouterr().err

    def test_bound_order_violation_names_the_bounds(self, tmp_path, capsys):
        cfg = write(tmp_path / "c.cfg", CAPACITY_SMALL)
        assert run("capacity", "solve", "--config", cfg,
                   "--set", "lambda_min=2.0") == 2
        assert "lambda_min" in capsys.readouterr().err

    def test_closed_vessel_too_small_is_rejected(self, tmp_path, capsys):
        cfg = write(tmp_path / "q.cfg", QUORUM_SMALL)
        assert run("validate", "--config", cfg,
                   "--set", "V_tot=1e-6") == 2
        err = capsys.readouterr().err
        assert "V_tot" in err or "vessel" in err or "volume" in err

    def test_model_mismatch_is_a_config_error(self, tmp_path):
        cfg = write(tmp_path / "q.cfg", QUORUM_SMALL)
        assert run("cell", "simulate", "--config", cfg) == 2

    def test_bad_input_series_is_a_config_error(self, tmp_path, capsys):
        cfg = write(tmp_path / "c.cfg", CELL_SMALL)
        series = write(tmp_path / "s.csv", "t,atp\n0.0,nan\n1.0,2.0\n")
        assert run("cell", "fit", "--config", cfg, "--in", series) == 2
        assert "non-finite" in capsys.readouterr().err

    def test_invalid_observation_times_map_to_model_error(self, tmp_path):
        cfg = write(tmp_path / "c.cfg", CELL_SMALL)
        series = write(tmp_path / "s.csv",
                       "t,atp\n5.0,1.0\n5.0,2.0\n6.0,3.0\n7.0,1.0\n")
        assert run("cell", "fit", "--config", cfg, "--in", series) == 3


class TestCsvContracts:
    def test_quorum_columns(self, tmp_path):
        cfg = write(tmp_path / "q.cfg", QUORUM_SMALL)
        out = tmp_path / "q.csv"
        run("quorum", "simulate", "--config", cfg, "--out", str(out))
        header = out.read_text().splitlines()[0]
        assert header == ("t,N,A,R_tot,C_tot,S_tot,V_expr,"
                          "eta_A_nM,eta_R_nM,eta_C_nM,eta_S_nM")

    def test_quorum_interference_appends_column(self, tmp_path):
        cfg = write(tmp_path / "q.cfg", QUORUM_SMALL + """
[interference]
mechanism = receptor_inhibition
mu_I = 1000.0
""")
        out = tmp_path / "q.csv"
        run("quorum", "simulate", "--config", cfg, "--out", str(out))
        assert out.read_text().splitlines()[0].endswith(",I")

    def test_cable_columns_follow_schema(self, tmp_path):
        cfg = write(tmp_path / "c.cfg", """
[run]
model = cable
horizon = 50.0
sample_period = 10.0

[cable]
n_cells = 2
""")
        out = tmp_path / "c.csv"
        run("cable", "simulate", "--config", cfg, "--out", str(out))
        header = out.read_text().splitlines()[0]
        assert header.startswith("t,cell1.m,cell1.n,cell1.qH,cell2.m")
        assert header.endswith(",throughput")

    def test_sweep_rows_match_requested_list(self, tmp_path):
        cfg = write(tmp_path / "c.cfg", CAPACITY_SMALL)
        out = tmp_path / "s.csv"
        assert run("capacity", "sweep", "--config", cfg, "--out", str(out),
                   "--set", "alpha_min_list=0.05,0.2,0.5,0.9") == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "alpha_min,rate_opt,rate_mp,gap_pct"
        assert len(lines) == 5
        got = [float(l.split(",")[0]) for l in lines[1:]]
        assert got == [0.05, 0.2, 0.5, 0.9]

    def test_solve_policy_covers_every_state(self, tmp_path):
        cfg = write(tmp_path / "c.cfg", CAPACITY_SMALL)
        out = tmp_path / "p.csv"
        assert run("capacity", "solve", "--config", cfg,
                   "--out", str(out)) == 0
        rows = out.read_text().splitlines()[1:]
        assert [int(r.split(",")[0]) for r in rows] == list(range(31))
        rates = json.loads((tmp_path / "p.csv.manifest.json").read_text())
        assert rates["rate_opt"] >= rates["rate_mp"]

    def test_default_out_name(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        cfg = write(tmp_path / "q.cfg", QUORUM_SMALL)
        assert run("quorum", "simulate", "--config", cfg) == 0
        assert (tmp_path / "quorum_trajectory.csv").exists()
        assert (tmp_path / "quorum_trajectory.csv.manifest.json").exists()


class TestFitCommands:
    def test_cell_fit_recovers_truth_from_exact_series(self, tmp_path):
        truth = CellParams(rho=0.06, zeta=0.05, beta=0.04,
                           m_ch_cap=6, n_atp_cap=6)
        profile = feeding_profile(peak=4.0, t_on=5.0, t_off=80.0, steps=4)
        t = np.linspace(5.0, 100.0, 12)
        pred = predict_atp(truth, profile, 100.0, step=None, eval_times=t)
        series = tmp_path / "obs.csv"
        with open(series, "w", newline="") as f:
            f.write("t,atp\n")
            for ti, v in zip(t, pred.atp):
                f.write(f"{float(ti)!r},{float(v)!r}\n")
        cfg = write(tmp_path / "c.cfg", CELL_SMALL)
        out = tmp_path / "fit.csv"
        assert run("cell", "fit", "--config", cfg, "--in", str(series),
                   "--out", str(out), "--set", "rho=0.03",
                   "--set", "zeta=0.025", "--set", "beta=0.02") == 0
        header, row = out.read_text().splitlines()
        got = dict(zip(header.split(","), row.split(",")))
        assert float(got["rho"]) == pytest.approx(0.06, rel=0.05)
        assert float(got["zeta"]) == pytest.approx(0.05, rel=0.05)
        assert float(got["beta"]) == pytest.approx(0.04, rel=0.05)
        assert got["converged"] == "1"

    def test_growth_fit_recovers_logistic_parameters(self, tmp_path):
        t = np.linspace(0.0, 14.0, 40)
        y = logistic(t, 1.5e6, 8e8, 0.65)
        series = tmp_path / "g.csv"
        with open(series, "w", newline="") as f:
            f.write("time_h,cells_per_ml\n")
            for ti, v in zip(t, y):
                f.write(f"{float(ti)!r},{float(v)!r}\n")
        cfg = write(tmp_path / "q.cfg", QUORUM_SMALL)
        out = tmp_path / "gfit.csv"
        assert run("quorum", "fit-growth", "--config", cfg,
                   "--in", str(series), "--out", str(out)) == 0
        header, row = out.read_text().splitlines()
        got = dict(zip(header.split(","), row.split(",")))
        assert float(got["rho_max"]) == pytest.approx(0.65, rel=0.01)
        assert float(got["capacity"]) == pytest.approx(8e8, rel=0.01)
        assert got["ok"] == "1"

    def test_degenerate_growth_series_flags_and_exits_4(self, tmp_path):
        series = write(tmp_path / "flat.csv",
                       "t,n\n" + "".join(f"{float(i)!r},1000.0\n"
                                         for i in range(6)))
        cfg = write(tmp_path / "q.cfg", QUORUM_SMALL)
        out = tmp_path / "gfit.csv"
        assert run("quorum", "fit-growth", "--config", cfg,
                   "--in", str(series), "--out", str(out)) == 4
        assert out.exists()
