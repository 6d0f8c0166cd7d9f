import json

import numpy as np
import pytest

from drivenchain.cli import main
from drivenchain.export import read_heatmap, read_records


def run(argv):
    return main([str(a) for a in argv])


class TestSolve:
    def test_writes_record_and_heatmap(self, tmp_path, capsys):
        out = tmp_path / "solve.csv"
        hm = tmp_path / "hm.csv"
        code = run(["solve", "--n", 16, "--omega", 3, "--eps", 0.1,
                    "--out", out, "--heatmap", hm])
        assert code == 0
        recs = read_records(out)
        assert len(recs) == 1 and recs[0].method == "spectral"
        assert read_heatmap(hm).shape == (16, 16)
        assert "midpoint_current" in capsys.readouterr().out

    def test_method_agreement(self, tmp_path):
        vals = {}
        for method in ("dense", "spectral", "ode"):
            out = tmp_path / f"{method}.csv"
            assert run(["solve", "--n", 6, "--omega", 2.5, "--eps", 0.2,
                        "--method", method, "--out", out]) == 0
            vals[method] = complex(read_records(out)[0].current_re,
                                   read_records(out)[0].current_im)
        assert vals["dense"] == pytest.approx(vals["spectral"], abs=1e-12)
        assert vals["ode"] == pytest.approx(vals["spectral"], abs=1e-6)

    def test_series_and_greens_methods(self, tmp_path):
        outs = {}
        for method in ("series", "greens", "spectral"):
            out = tmp_path / f"{method}.csv"
            assert run(["solve", "--n", 17, "--omega", 12, "--eps", 1e-3,
                        "--method", method, "--out", out]) == 0
            outs[method] = read_records(out)[0].current_abs
        assert outs["series"] == pytest.approx(outs["spectral"], rel=1e-2)
        assert outs["greens"] == pytest.approx(outs["spectral"], rel=1e-2)

    def test_plot_rendered_alongside_data(self, tmp_path):
        hm = tmp_path / "hm.csv"
        assert run(["solve", "--n", 8, "--omega", 2, "--eps", 0.1,
                    "--heatmap", hm, "--plot"]) == 0
        assert (tmp_path / "hm.png").exists()

    def test_parameter_error_exit_1(self):
        assert run(["solve", "--n", 1, "--omega", 2, "--eps", 0.1]) == 1
        assert run(["solve", "--n", 8, "--omega", 2, "--eps", -0.5]) == 1

    def test_solver_error_exit_2(self):
        # dense size guard trips -> solver failure
        assert run(["solve", "--n", 100, "--omega", 2, "--eps", 0.1,
                    "--method", "dense"]) == 2

    def test_unknown_flag_exit_1(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run(["solve", "--n", 8, "--bogus", 1])
        assert exc.value.code == 1


class TestSweep:
    def test_csv_output_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["sweep", "--n", 12, "--eps", 0.5, "--omega-min", 1,
                "--omega-max", 7, "--omega-steps", 15]
        assert run(args + ["--out", a]) == 0
        assert run(args + ["--out", b]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_json_format_and_plot(self, tmp_path):
        out = tmp_path / "sweep.json"
        assert run(["sweep", "--n", 12, "--eps", 0.5, "--omega-min", 1,
                    "--omega-max", 7, "--omega-steps", 10,
                    "--out", out, "--format", "json", "--plot"]) == 0
        payload = json.loads(out.read_text())
        assert len(payload) == 10
        assert list(payload[0]) == ["omega", "n", "eps", "mu0", "method",
                                    "current_re", "current_im", "current_abs"]
        assert (tmp_path / "sweep.png").exists()

    def test_bad_grid_exit_1(self):
        assert run(["sweep", "--n", 12, "--omega-min", 5, "--omega-max", 1,
                    "--omega-steps", 10]) == 1


class TestScaling:
    def test_critical_even_fit(self, tmp_path, capsys):
        out = tmp_path / "scal.csv"
        assert run(["scaling", "--omega", 8, "--eps", 0.1,
                    "--n-list", "32,64,128,192,256", "--out", out]) == 0
        msg = capsys.readouterr().out
        assert "kind=power_law" in msg
        alpha = float(msg.split("alpha=")[1].split()[0])
        assert abs(alpha - 2.0) < 0.15
        assert len(read_records(out)) == 5

    def test_parity_filter(self, capsys):
        assert run(["scaling", "--omega", 8, "--eps", 0.1, "--parity", "odd",
                    "--n-min", 33, "--n-max", 257, "--n-points", 6]) == 0
        assert "kind=power_law" in capsys.readouterr().out

    def test_mixed_parity_at_critical_exit_1(self):
        assert run(["scaling", "--omega", 8, "--eps", 0.1,
                    "--n-list", "32,33,64,65,128"]) == 1

    def test_missing_n_spec_exit_1(self):
        assert run(["scaling", "--omega", 8, "--eps", 0.1]) == 1


class TestResonances:
    def test_table_output(self, tmp_path, capsys):
        out = tmp_path / "res.csv"
        assert run(["resonances", "--n", 257, "--eps", 1e-3,
                    "--omega-min", 7.97, "--omega-max", 7.99, "--out", out]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "p,m,omega"
        rows = [ln.split(",") for ln in lines[1:]]
        assert ["5", "6"] in [r[:2] for r in rows]

    def test_json_table(self, tmp_path):
        out = tmp_path / "res.json"
        assert run(["resonances", "--n", 16, "--eps", 0.1,
                    "--format", "json", "--out", out]) == 0
        payload = json.loads(out.read_text())
        assert all(set(e) == {"p", "m", "omega"} for e in payload)


class TestOracle:
    def test_agreement_exit_0(self, capsys):
        assert run(["oracle", "--n", 4, "--omega", 3, "--eps", 0.1]) == 0
        assert "OK" in capsys.readouterr().out

    def test_impossible_tolerance_exit_2(self):
        assert run(["oracle", "--n", 4, "--omega", 3, "--eps", 0.1,
                    "--tolerance", "1e-300"]) == 2
