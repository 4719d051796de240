import json

import numpy as np
import pytest

from dicke_qb.cli import main

BASE = {
    "params": {"n_tls": 3, "g": 0.5},
    "protocol": {"search_horizon": 5.0, "coarse_points": 200},
}


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def run(args):
    return main(args)


class TestTrace:
    def test_outputs_and_first_row(self, tmp_path):
        cfg = write_config(tmp_path, BASE)
        out = tmp_path / "out"
        assert run(["trace", "--config", cfg, "--out", str(out), "--formats", "csv,json,svg"]) == 0
        lines = (out / "trace.csv").read_text().splitlines()
        assert lines[0] == "t,energy,power,fluctuation,sz_ratio"
        assert lines[1] == "0,0,0,0,-1"
        assert len(lines) == 202
        sidecar = json.loads((out / "trace.json").read_text())
        assert sidecar["params"]["n_tls"] == 3
        assert sidecar["units"]["energy"] == "omega_a"
        assert (out / "trace.svg").exists()

    def test_byte_identical_reruns(self, tmp_path):
        cfg = write_config(tmp_path, BASE)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert run(["trace", "--config", cfg, "--out", str(out1)]) == 0
        assert run(["trace", "--config", cfg, "--out", str(out2)]) == 0
        assert (out1 / "trace.csv").read_bytes() == (out2 / "trace.csv").read_bytes()
        assert (out1 / "trace.json").read_bytes() == (out2 / "trace.json").read_bytes()

    def test_flag_overrides_config(self, tmp_path):
        cfg = write_config(tmp_path, BASE)
        out = tmp_path / "out"
        assert run(["trace", "--config", cfg, "--out", str(out), "--n-tls", "2"]) == 0
        sidecar = json.loads((out / "trace.json").read_text())
        assert sidecar["params"]["n_tls"] == 2

    def test_peak_energy_reference_cell(self, tmp_path):
        out = tmp_path / "out"
        rc = run([
            "trace", "--n-tls", "10", "--g", "0.5", "--horizon", "10",
            "--coarse-points", "1000", "--out", str(out),
        ])
        assert rc == 0
        rows = (out / "trace.csv").read_text().splitlines()[1:]
        peak = max(float(r.split(",")[1]) for r in rows)
        assert peak == pytest.approx(6.768, abs=0.05)

    def test_csv_round_trips_full_precision(self, tmp_path):
        cfg = write_config(tmp_path, BASE)
        out = tmp_path / "out"
        run(["trace", "--config", cfg, "--out", str(out)])
        rows = (out / "trace.csv").read_text().splitlines()[1:]
        data = np.array([[float(x) for x in row.split(",")] for row in rows])
        from dicke_qb import ChargingProtocol, ModelParams, charging_trace

        tr = charging_trace(ModelParams(n_tls=3, g=0.5), ChargingProtocol(5.0, 200))
        assert np.array_equal(data[:, 1], tr.energy)
        assert np.array_equal(data[:, 4], tr.sz)


class TestExitCodes:
    def test_no_command_usage(self, capsys):
        assert run([]) == 1

    def test_unknown_command(self):
        assert run(["charge-my-phone"]) == 1

    def test_missing_required_params(self, tmp_path):
        assert run(["trace", "--out", str(tmp_path)]) == 1

    def test_malformed_config(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        assert run(["trace", "--config", str(bad), "--out", str(tmp_path)]) == 1

    def test_unknown_config_key(self, tmp_path):
        cfg = write_config(tmp_path, {**BASE, "bogus": 1})
        assert run(["trace", "--config", cfg, "--out", str(tmp_path)]) == 1

    def test_unwritable_output(self, tmp_path):
        cfg = write_config(tmp_path, BASE)
        assert run(["trace", "--config", cfg, "--out", "/dev/null/nested"]) == 2

    def test_memory_guard_resource_error(self, tmp_path):
        cfg = write_config(tmp_path, {"params": {"n_tls": 99, "g": 0.5, "cutoff_factor": 9}})
        assert run(["extrema", "--config", cfg, "--out", str(tmp_path)]) == 2

    def test_partial_sweep_failure(self, tmp_path):
        doc = {
            **BASE,
            "axes": {
                "axis1": {"name": "n_tls", "values": [2, 1000]},
                "axis2": {"name": "eta", "values": [0.0]},
            },
            "quantity": "e_max",
        }
        cfg = write_config(tmp_path, doc)
        out = tmp_path / "out"
        assert run(["sweep", "--config", cfg, "--out", str(out)]) == 3
        sidecar = json.loads((out / "sweep.json").read_text())
        assert sidecar["failed_cells"]


class TestSweepAndPhase:
    def test_long_form_csv(self, tmp_path):
        doc = {
            **BASE,
            "axes": {
                "axis1": {"name": "g", "values": [0.1, 0.5]},
                "axis2": {"name": "eta", "start": 0.0, "stop": 1.0, "num": 3},
            },
            "quantity": "e_max",
        }
        cfg = write_config(tmp_path, doc)
        out = tmp_path / "out"
        assert run(["sweep", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        assert lines[0] == "g,eta,e_max"
        assert len(lines) == 7
        first = lines[1].split(",")
        assert float(first[0]) == 0.1 and float(first[1]) == 0.0

    def test_single_cell_sweep_matches_extrema(self, tmp_path):
        doc = {
            **BASE,
            "axes": {
                "axis1": {"name": "g", "values": [0.5]},
                "axis2": {"name": "eta", "values": [0.0]},
            },
            "quantity": "e_max",
        }
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert run(["sweep", "--config", write_config(tmp_path, doc), "--out", str(out1)]) == 0
        assert run(["extrema", "--config", write_config(tmp_path, BASE, "c2.json"), "--out", str(out2)]) == 0
        swept = float((out1 / "sweep.csv").read_text().splitlines()[1].split(",")[2])
        single = float((out2 / "extrema.csv").read_text().splitlines()[1].split(",")[0])
        assert swept == single

    def test_phase_emits_critical_curve(self, tmp_path):
        doc = {
            "params": {"n_tls": 4, "g": 0.1},
            "axes": {
                "axis1": {"name": "g", "values": [0.1, 0.2]},
                "axis2": {"name": "eta", "values": [0.0, 1.0]},
            },
        }
        cfg = write_config(tmp_path, doc)
        out = tmp_path / "out"
        assert run(["phase", "--config", cfg, "--out", str(out)]) == 0
        crit = (out / "critical.csv").read_text().splitlines()
        assert crit[0] == "g,eta_c"
        g, eta_c = (float(x) for x in crit[1].split(","))
        assert eta_c == pytest.approx(1.0 - 4 * g * g * 4)

    def test_phase_without_g_eta_axes_skips_critical(self, tmp_path):
        doc = {
            "params": {"n_tls": 3, "g": 0.1},
            "axes": {
                "axis1": {"name": "omega_drive", "values": [0.0, 0.5]},
                "axis2": {"name": "eta", "values": [0.0]},
            },
        }
        cfg = write_config(tmp_path, doc)
        out = tmp_path / "out"
        assert run(["phase", "--config", cfg, "--out", str(out)]) == 0
        assert not (out / "critical.csv").exists()


class TestScaling:
    def test_synthetic_injection_exact(self, tmp_path):
        doc = {
            "params": {"n_tls": 2, "g": 0.5},
            "scaling": {
                "sets": [{"label": "syn", "synthetic": {"alpha": 1.5, "beta": 2.0}}],
                "n_min": 1,
                "n_max": 30,
            },
        }
        cfg = write_config(tmp_path, doc)
        out = tmp_path / "out"
        assert run(["scaling", "--config", cfg, "--out", str(out)]) == 0
        label, alpha, beta, residual = (out / "alphas.csv").read_text().splitlines()[1].split(",")
        assert label == "syn"
        assert float(alpha) == pytest.approx(1.5, abs=1e-12)
        assert float(beta) == pytest.approx(2.0, abs=1e-12)
        assert float(residual) <= 1e-12
        per_set = (out / "scaling_syn.csv").read_text().splitlines()
        assert per_set[0] == "N,p_max_normalized"
        assert len(per_set) == 31

    def test_simulated_small_scan(self, tmp_path):
        doc = {
            "params": {"n_tls": 2, "g": 0.5},
            "protocol": {"search_horizon": 10.0, "coarse_points": 300},
            "scaling": {"sets": [{"label": "dicke", "eta": 0.0}], "n_min": 1, "n_max": 6},
        }
        cfg = write_config(tmp_path, doc)
        out = tmp_path / "out"
        assert run(["scaling", "--config", cfg, "--out", str(out)]) == 0
        alpha = float((out / "alphas.csv").read_text().splitlines()[1].split(",")[1])
        assert 1.2 <= alpha <= 1.8


class TestConvergence:
    def test_rows(self, tmp_path):
        doc = {**BASE, "factors": [1, 2, 3]}
        cfg = write_config(tmp_path, doc)
        out = tmp_path / "out"
        assert run(["convergence", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "convergence.csv").read_text().splitlines()
        assert lines[0] == "factor,e_max,p_max,abs_delta_e_max"
        assert len(lines) == 4


class TestReproduce:
    def test_cutoff_table_passes(self, tmp_path):
        out = tmp_path / "out"
        assert run(["reproduce", "--tables", "cutoff", "--out", str(out)]) == 0
        report = (out / "report.md").read_text()
        assert "cutoff" in report and "PASS" in report
        assert (out / "reproduce_cutoff.csv").exists()

    def test_unknown_table_usage_error(self, tmp_path):
        assert run(["reproduce", "--tables", "table9", "--out", str(tmp_path)]) == 1
