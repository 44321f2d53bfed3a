"""Driver tests: config resolution, run artifacts, determinism, plotting."""
import json
import os

import numpy as np
import pytest

from uncon import cli
from uncon.cli import RunConfig, main
from uncon.simgen import load_curves

TINY_GRID = json.dumps({"sigma": [1.0, 3.0], "c": [0.5], "p": [1.0, 2.0]})


@pytest.fixture(autouse=True)
def _single_worker(monkeypatch):
    monkeypatch.setenv("UNCON_THREADS", "1")


class TestRunConfig:
    def test_defaults_fill_censor_and_methods(self):
        cfg = RunConfig(experiment="exp1", shape="convex")
        assert cfg.censor_spec == (0.2, 0.6, 0.98)
        assert "gp" in cfg.methods and "des" in cfg.methods

    def test_changepoint_defaults(self):
        cfg = RunConfig(experiment="changepoint", shape="scenario3")
        assert cfg.censor_spec == (105,)
        assert cfg.methods == ("gp", "gp_cp")

    def test_rejects_unknown_experiment(self):
        with pytest.raises(ValueError):
            RunConfig(experiment="exp9", shape="convex")

    def test_rejects_unknown_shape(self):
        with pytest.raises(ValueError):
            RunConfig(experiment="exp1", shape="wavy")

    def test_rejects_unknown_method(self):
        with pytest.raises(ValueError):
            RunConfig(experiment="exp1", shape="convex", methods=("gp", "arima"))

    def test_rejects_exp1_fraction_out_of_range(self):
        with pytest.raises(ValueError):
            RunConfig(experiment="exp1", shape="convex", censor_spec=(1.5,))

    def test_rejects_window_beyond_horizon(self):
        with pytest.raises(ValueError):
            RunConfig(experiment="exp2", shape="convex", censor_spec=(140,))

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            RunConfig(experiment="exp1", shape="convex", repeats=0)
        with pytest.raises(ValueError):
            RunConfig(experiment="exp1", shape="convex", curves=1)


class TestParseCensor:
    def test_fractions_and_windows(self):
        assert cli._parse_censor("0.2,0.6,0.98") == (0.2, 0.6, 0.98)
        assert cli._parse_censor("20") == (20,)
        assert cli._parse_censor("5, 10 ,20") == (5, 10, 20)


class TestGenerate:
    def test_writes_loadable_population(self, tmp_path):
        out = tmp_path / "pop.csv"
        rc = main(["generate", "--experiment", "exp1", "--shape", "convex",
                   "--censor", "0.6", "--curves", "25", "--seed", "3",
                   "--out", str(out)])
        assert rc == 0
        curves = load_curves(out)
        assert len(curves) == 25
        assert all(len(c.daily) == 140 for c in curves)
        assert any(c.constrained for c in curves)

    def test_round_trip_preserves_censoring(self, tmp_path):
        out = tmp_path / "pop.csv"
        main(["generate", "--experiment", "exp1", "--shape", "concave",
              "--censor", "0.6", "--curves", "20", "--seed", "5",
              "--out", str(out)])
        for c in load_curves(out):
            if c.constrained:
                assert c.limit is not None
                assert 0 <= c.constrained_from < 140


class TestRun:
    def _run(self, out_dir, extra=()):
        args = ["run", "--experiment", "exp1", "--shape", "convex",
                "--censor", "0.6", "--curves", "14", "--repeats", "1",
                "--seed", "7", "--methods", "em,des,mean_impute",
                "--out", str(out_dir)]
        return main(args + list(extra))

    def test_writes_report_per_curve_config_and_svg(self, tmp_path):
        out = tmp_path / "run1"
        assert self._run(out) == 0
        report = (out / "report.csv").read_text().strip().split("\n")
        assert report[0] == ",".join(cli.REPORT_COLUMNS)
        # 3 methods x 3 metrics for the single censor level
        assert len(report) == 1 + 9
        per_curve = (out / "per_curve.csv").read_text().strip().split("\n")
        assert per_curve[0] == ",".join(cli.PER_CURVE_COLUMNS)
        assert len(per_curve) > 1
        cfg = json.loads((out / "config.json").read_text())
        assert cfg["experiment"] == "exp1" and cfg["seed"] == 7
        svg = (out / "curves_0_6.svg").read_text()
        assert svg.startswith("<svg") and "polyline" in svg

    def test_totals_only_methods_leave_e2_blank(self, tmp_path):
        out = tmp_path / "run2"
        self._run(out)
        rows = [r.split(",") for r in (out / "report.csv").read_text().strip().split("\n")[1:]]
        em_e2 = [r for r in rows if r[3] == "em" and r[4] == "e2"]
        des_e2 = [r for r in rows if r[3] == "des" and r[4] == "e2"]
        assert em_e2[0][5] == ""
        assert des_e2[0][5] != ""

    def test_repeated_run_is_byte_identical(self, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        self._run(out_a)
        self._run(out_b)
        assert (out_a / "report.csv").read_bytes() == (out_b / "report.csv").read_bytes()
        assert (out_a / "per_curve.csv").read_bytes() == (out_b / "per_curve.csv").read_bytes()

    def test_gp_method_with_custom_grid(self, tmp_path):
        out = tmp_path / "run3"
        rc = main(["run", "--experiment", "exp1", "--shape", "homogeneous",
                   "--censor", "0.6", "--curves", "10", "--repeats", "1",
                   "--seed", "11", "--methods", "gp", "--grid", TINY_GRID,
                   "--out", str(out)])
        assert rc == 0
        rows = [r.split(",") for r in (out / "report.csv").read_text().strip().split("\n")[1:]]
        gp_e3 = [r for r in rows if r[3] == "gp" and r[4] == "e3"]
        assert float(gp_e3[0][5]) >= 0.0
        cfg = json.loads((out / "config.json").read_text())
        assert cfg["grid"]["p"] == [1.0, 2.0]

    def test_config_file_with_flag_overrides(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({
            "experiment": "exp1", "shape": "convex", "censor_spec": [0.6],
            "curves": 12, "repeats": 1, "methods": ["em"], "seed": 1,
            "out": str(tmp_path / "ignored")}))
        out = tmp_path / "run4"
        rc = main(["run", "--config", str(cfg_path), "--seed", "9",
                   "--out", str(out)])
        assert rc == 0
        echoed = json.loads((out / "config.json").read_text())
        assert echoed["seed"] == 9
        assert echoed["curves"] == 12

    def test_missing_experiment_is_a_usage_error(self, tmp_path, capsys):
        rc = main(["run", "--out", str(tmp_path / "x")])
        assert rc == 2
        assert "experiment" in capsys.readouterr().err


class TestPlot:
    def test_renders_selected_curve(self, tmp_path):
        pop = tmp_path / "pop.csv"
        main(["generate", "--experiment", "exp1", "--shape", "convex",
              "--censor", "0.6", "--curves", "20", "--seed", "3",
              "--out", str(pop)])
        out = tmp_path / "curve.svg"
        rc = main(["plot", "--curves", str(pop), "--methods", "des,em",
                   "--out", str(out)])
        assert rc == 0
        text = out.read_text()
        assert text.startswith("<svg")
        assert "constrained from day" in text

    def test_unconstrained_index_is_an_error(self, tmp_path, capsys):
        pop = tmp_path / "pop.csv"
        main(["generate", "--experiment", "exp1", "--shape", "convex",
              "--censor", "0.6", "--curves", "20", "--seed", "3",
              "--out", str(pop)])
        curves = load_curves(pop)
        free = next(i for i, c in enumerate(curves) if not c.constrained)
        rc = main(["plot", "--curves", str(pop), "--index", str(free),
                   "--out", str(tmp_path / "x.svg")])
        assert rc == 2
        assert "not constrained" in capsys.readouterr().err
