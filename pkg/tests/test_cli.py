import json
import subprocess
import sys

import numpy as np
import pytest

from slaplace.cli import main
from slaplace.data import read_points_csv
from slaplace.mixture import SLMixture


def _run(tmp_path, *argv):
    # commands write relative to --output, so anchor everything in tmp_path
    code = main([a.replace("@", str(tmp_path)) for a in argv])
    return code


def test_sample_writes_table_meta_and_figures(tmp_path):
    code = _run(tmp_path, "sample", "--p", "2", "--sigma", "0.4", "--n", "50",
                "--seed", "3", "--output", "@/pts.csv")
    assert code == 0
    pts, _ = read_points_csv(tmp_path / "pts.csv")
    assert pts.shape == (50, 3)
    meta = json.loads((tmp_path / "pts.meta.json").read_text())
    assert meta["command"] == "sample"
    assert meta["config"]["seed"] == 3
    assert meta["p"] == 2
    assert (tmp_path / "pts_radial.png").exists()
    assert (tmp_path / "pts_scatter.png").exists()


def test_sample_no_plot_and_high_dim(tmp_path):
    code = _run(tmp_path, "sample", "--p", "6", "--sigma", "0.2", "--n", "30",
                "--output", "@/pts.csv", "--no-plot")
    assert code == 0
    assert not (tmp_path / "pts_radial.png").exists()
    code = _run(tmp_path, "sample", "--p", "6", "--sigma", "0.2", "--n", "30",
                "--output", "@/pts2.csv")
    assert code == 0
    assert (tmp_path / "pts2_radial.png").exists()
    # no planar scatter above ambient dimension 3
    assert not (tmp_path / "pts2_scatter.png").exists()


def test_sample_rejection_reports_rates(tmp_path):
    code = _run(tmp_path, "sample", "--p", "2", "--sigma", "1.0", "--n", "200",
                "--method", "rejection", "--seed", "1", "--output", "@/r.csv",
                "--no-plot")
    assert code == 0
    meta = json.loads((tmp_path / "r.meta.json").read_text())
    assert meta["sampler"]["n_accepted"] == 200
    assert meta["sampler"]["n_proposed"] >= 200
    assert 0.0 < meta["expected_acceptance_rate"] < 1.0


def test_sample_json_format(tmp_path):
    code = _run(tmp_path, "sample", "--mu", "0,0,1", "--sigma", "0.3", "--n", "20",
                "--format", "json", "--output", "@/pts.json", "--no-plot")
    assert code == 0
    rows = json.loads((tmp_path / "pts.json").read_text())
    assert len(rows) == 20
    assert set(rows[0]) == {"x0", "x1", "x2"}


def test_sample_argument_conflicts(tmp_path, capsys):
    code = _run(tmp_path, "sample", "--p", "3", "--mu", "0,0,1", "--sigma", "0.3",
                "--n", "5", "--output", "@/x.csv")
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_byte_identical_reruns(tmp_path):
    for sub in ("a", "b"):
        (tmp_path / sub).mkdir()
        code = main(["sample", "--p", "2", "--sigma", "0.5", "--n", "40",
                     "--method", "mh", "--seed", "11",
                     "--output", str(tmp_path / sub / "s.csv"), "--no-plot"])
        assert code == 0
    assert (tmp_path / "a" / "s.csv").read_bytes() == (tmp_path / "b" / "s.csv").read_bytes()
    assert (tmp_path / "a" / "s.meta.json").read_text().replace(str(tmp_path / "a"), "") \
        == (tmp_path / "b" / "s.meta.json").read_text().replace(str(tmp_path / "b"), "")


def test_fit_round_trip(tmp_path):
    _run(tmp_path, "sample", "--p", "2", "--sigma", "0.1", "--n", "500",
         "--seed", "2", "--output", "@/pts.csv", "--no-plot")
    code = _run(tmp_path, "fit", "--input", "@/pts.csv", "--output", "@/fit.csv",
                "--no-plot")
    assert code == 0
    header, row = (tmp_path / "fit.csv").read_text().splitlines()
    cells = dict(zip(header.split(","), row.split(",")))
    assert float(cells["sigma_hat"]) == pytest.approx(0.1, rel=0.2)
    assert abs(float(cells["mu2"])) > 0.99


def test_cluster_outputs_and_model(tmp_path):
    from slaplace.data import sample_small_mix, write_points_csv
    pts, labels = sample_small_mix(np.random.default_rng(1), 150)
    write_points_csv(tmp_path / "mix.csv", pts, labels=labels)
    code = _run(tmp_path, "cluster", "--input", "@/mix.csv", "--k", "2",
                "--seed", "5", "--output", "@/cl.csv")
    assert code == 0
    lines = (tmp_path / "cl.csv").read_text().splitlines()
    assert lines[0] == "index,truth,label,gamma0,gamma1"
    assert len(lines) == 151
    model = json.loads((tmp_path / "cl.model.json").read_text())
    mix = SLMixture.from_dict(model["mixture"])
    assert mix.n_components == 2
    assert model["iterations"] >= 1
    meta = json.loads((tmp_path / "cl.meta.json").read_text())
    assert meta["metrics"]["jaccard"] > 0.9
    assert (tmp_path / "cl_trace.png").exists()
    assert (tmp_path / "cl_scatter.png").exists()


def test_smallmix_summary(tmp_path):
    code = _run(tmp_path, "smallmix", "--repeats", "3", "--seed", "9",
                "--output", "@/sm.csv", "--no-plot")
    assert code == 0
    lines = (tmp_path / "sm.csv").read_text().splitlines()
    assert lines[0] == ("repeat,seed,jaccard_soft,rand_soft,nmi_soft,"
                        "jaccard_hard,rand_hard,nmi_hard")
    assert len(lines) == 4
    meta = json.loads((tmp_path / "sm.meta.json").read_text())
    assert 0.0 <= meta["mean"]["jaccard_soft"] <= 1.0


def test_household_synthetic(tmp_path):
    code = _run(tmp_path, "household", "--seed", "0", "--output", "@/hh.csv",
                "--no-plot")
    assert code == 0
    meta = json.loads((tmp_path / "hh.meta.json").read_text())
    assert meta["source"] == "synthetic"
    assert meta["metrics"]["jaccard"] > 0.5
    assert (tmp_path / "hh.model.json").exists()


def test_household_reads_compositional_file(tmp_path):
    from slaplace.data import sample_household_standin, write_compositional_csv
    values, genders = sample_household_standin(np.random.default_rng(2), 15)
    write_compositional_csv(tmp_path / "comp.csv", values, genders)
    code = _run(tmp_path, "household", "--input", "@/comp.csv", "--seed", "1",
                "--output", "@/hh.csv", "--no-plot")
    assert code == 0
    meta = json.loads((tmp_path / "hh.meta.json").read_text())
    assert meta["source"].endswith("comp.csv")


def test_bench_location_schema(tmp_path):
    code = _run(tmp_path, "bench-location", "--p-list", "2", "--sigma-list", "0.1",
                "--n-list", "50,100", "--repeats", "3", "--seed", "7",
                "--output", "@/bl.csv")
    assert code == 0
    lines = (tmp_path / "bl.csv").read_text().splitlines()
    assert lines[0] == "p,sigma0,n,repeat,seed,err_weiszfeld,err_rgd"
    assert len(lines) == 7
    assert lines[1].endswith(",")  # baseline column stays empty
    meta = json.loads((tmp_path / "bl.meta.json").read_text())
    assert len(meta["cells"]) == 2
    assert (tmp_path / "bl_curve.png").exists()


def test_bench_scale_schema(tmp_path):
    code = _run(tmp_path, "bench-scale", "--p-list", "2", "--sigma-list", "0.1",
                "--n-list", "50", "--repeats", "3", "--seed", "7",
                "--output", "@/bs.csv", "--no-plot")
    assert code == 0
    lines = (tmp_path / "bs.csv").read_text().splitlines()
    assert lines[0] == ("p,sigma0,n,repeat,seed,err_newton_exact,"
                        "err_newton_approx,err_roptim,err_de")
    meta = json.loads((tmp_path / "bs.meta.json").read_text())
    assert meta["cells"][0]["max_solver_disagreement"] < 1e-3


def test_missing_input_fails_cleanly(tmp_path, capsys):
    code = _run(tmp_path, "fit", "--input", "@/nope.csv", "--output", "@/f.csv")
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_console_script_help():
    out = subprocess.run([sys.executable, "-m", "slaplace.cli", "--help"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert "sample" in out.stdout and "bench-scale" in out.stdout
