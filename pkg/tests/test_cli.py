import csv
import io
import json
import math
import subprocess
import sys

import pytest

from ecardioid.cli import dumps, main
from ecardioid.data import AngleParseError, parse_angle_values, parse_angles, wind_sample

from conftest import TWO_PI, load_cases

CASES = load_cases("cli")


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv)
    assert code == 0, err
    doc = json.loads(out)
    assert doc["schema"] == "1"
    return doc


PARAMS = ("--beta", "2", "--rho", "0.2", "--mu", "2")


def test_parse_fixtures():
    c = CASES["parse_356_deg"]
    assert parse_angle_values([c["inputs"]["token"]], "deg")[0] == pytest.approx(c["expected"], abs=c["tol"])
    z = CASES["parse_0_deg"]
    assert parse_angle_values(["0"], "deg")[0] == z["expected"]
    assert wind_sample().n == CASES["wind_n"]["expected"]


def test_parse_errors_and_formats(tmp_path):
    with pytest.raises(AngleParseError) as info:
        parse_angle_values(["1.0", "# note", "2, x"], "rad")
    assert info.value.line == 3 and info.value.token == "x"
    with pytest.raises(ValueError):
        parse_angle_values(["# nothing"], "rad")
    with pytest.raises(AngleParseError):
        parse_angle_values(["inf"], "rad")
    f = tmp_path / "a.txt"
    f.write_text("90\n180, 270 # comment\n\n360\n", encoding="utf-8")
    s = parse_angles(f, unit="deg")
    assert list(s.angles) == pytest.approx([math.pi / 2, math.pi, 3 * math.pi / 2, TWO_PI])


def test_quantile_median_of_uniform():
    doc = run_json("quantile", "--alpha", "0.5", "--beta", "1", "--rho", "0", "--mu", "6.283185")
    assert doc["quantile"][0] == pytest.approx(math.pi, rel=1e-11)


def test_quantile_approx_reports_branch():
    doc = run_json("quantile", "--approx", "--alpha", "0.25,0.75", *PARAMS)
    assert len(doc["branch"]) == 2 and all(isinstance(b, int) for b in doc["branch"])


def test_sample_is_deterministic():
    a = run("sample", "--n", "5", "--seed", "7", *PARAMS)
    b = run("sample", "--n", "5", "--seed", "7", *PARAMS)
    assert a == b and a[0] == 0
    assert len(json.loads(a[1])["angles"]) == 5
    c = run("sample", "--n", "5", "--seed", "8", *PARAMS)
    assert c[1] != a[1]


def test_density_cdf_and_series_paths():
    d = run_json("density", "--theta", "1,2", *PARAMS)
    c = run_json("cdf", "--theta", "3.141592653589793", *PARAMS)
    s = run_json("cdf", "--series", "--theta", "3.141592653589793", *PARAMS)
    assert len(d["density"]) == 2
    assert s["cdf"][0] == pytest.approx(c["cdf"][0], abs=1e-12)
    assert c["theta"] == [math.pi]


def test_floats_are_round_trippable():
    text = dumps({"x": 0.1 + 0.2, "y": math.inf, "z": [1, None]})
    assert json.loads(text)["x"] == 0.1 + 0.2
    assert json.loads(text)["y"] is None


def test_exit_codes():
    assert run("no-such-command")[0] == 1
    assert run("density", "--beta", "2")[0] == 1
    assert run("density", "--theta", "1", "--beta", "2", "--rho", "0.7", "--mu", "1")[0] == 1
    code, out, err = run("cdf", "--series", "--theta", "1", "--beta", "2", "--rho", "0.5", "--mu", "1")
    assert code == 2
    assert json.loads(out)["error"]["type"] == "SeriesConvergenceError"
    assert "numerical failure" in err
    assert run("quantile", "--alpha", "1.5", *PARAMS)[0] == 1
    assert run("fit", "--data", "/nonexistent/angles.txt")[0] == 1


def test_moments_and_measures():
    m = run_json("moments", "--beta", "1", "--rho", "0.25", "--mu", "1")
    first = m["moments"][0]
    assert first["order"] == 1 and first["alpha"] == pytest.approx(0.25, abs=1e-10)
    meas = run_json("measures", "--beta", "1", "--rho", "0", "--mu", "1")
    assert meas["measures"]["variance"] == pytest.approx(1.0)
    assert meas["measures"]["std_dev"] == {"undefined": "mean resultant length is zero"}


def test_modality_and_table_csv():
    doc = run_json("modality", "--beta", "2", "--rho", "0.3", "--mu", "0.5235987755982988")
    assert doc["class"] == "Bimodal"
    code, out, _ = run("modality-table", "--format", "csv", "--betas", "1", "--rhos", "0.1,0.2", "--mus", "2")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["beta", "rho", "mu", "class", "mode1", "mode2", "borderline"]
    assert [r[3] for r in rows[1:]] == ["Unimodal", "Unimodal"]


def test_fit_from_stdin_like_file(tmp_path):
    f = tmp_path / "w.txt"
    f.write_text("\n".join(str(d) for d in (356, 97, 211, 232, 343, 292, 157, 302, 335, 302, 324,
                                            85, 324, 340, 157, 238, 254, 146, 232, 122, 329)), encoding="utf-8")
    doc = run_json("fit", "--data", str(f), "--unit", "deg", "--model", "cardioid")
    assert doc["params"]["rho"] == pytest.approx(0.2436, abs=0.01)
    assert run("fit", "--model", "vonmises", "--method", "qlse")[0] == 1


def test_wind_demo_report():
    doc = run_json("wind-demo")
    models = {m["model"]: m for m in doc["models"]}
    ec = models["EC"]
    assert [ec["params"][k] for k in ("beta", "rho", "mu")] == pytest.approx([2.8757, 0.2164, 1.1782], abs=0.02)
    assert ec["kuiper"] == pytest.approx(0.7369, abs=0.01)
    assert ec["watson"] == pytest.approx(0.0257, abs=0.005)
    assert doc["lrt"]["p_value"] == pytest.approx(0.0027, abs=0.001)
    assert doc["data_degrees"][0] == 356 and doc["n"] == 21


def test_wind_demo_csv_header_and_stability():
    a = run("wind-demo", "--format", "csv")
    b = run("wind-demo", "--format", "csv")
    assert a == b
    rows = list(csv.reader(io.StringIO(a[1])))
    assert rows[0] == ["model", "param1", "param2", "param3", "se1", "se2", "se3", "kuiper", "watson"]
    assert [r[0] for r in rows[1:]] == ["Cardioid", "EC", "VonMises"]


def test_simulate_small_and_csv_header():
    code, out, _ = run("simulate", "--format", "csv", "--reps", "2", "--n", "30", *PARAMS)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["truth", "method", "n", "bias_beta", "bias_rho", "bias_mu",
                       "mse_beta", "mse_rho", "mse_mu", "failures"]
    assert [r[1] for r in rows[1:]] == ["MLE", "QLSE"]
    assert run("simulate", "--reps", "0", *PARAMS)[0] == 1


def test_compare_systems_and_skewkurt():
    doc = run_json("compare-systems", "--reps", "2", "--n", "40", *PARAMS)
    assert set(doc) >= {"full", "profiled", "seconds_full", "seconds_profiled"}
    sk = run_json("skewkurt-map", "--betas", "1", "--rhos", "0,0.2", "--mus", "1")
    assert len(sk["rows"]) == 2 and sk["rows"][1]["skewness"] == pytest.approx(0.0, abs=1e-9)


def test_gof_and_lrt_commands():
    g = run_json("gof")
    assert [m["model"] for m in g["models"]] == ["Cardioid", "EC", "VonMises"]
    lrt = run_json("lrt")
    assert lrt["df"] == 1 and lrt["p_value"] == pytest.approx(0.0027, abs=0.001)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ecardioid", "quantile", "--alpha", "1",
                           "--beta", "1", "--rho", "0", "--mu", "1"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["quantile"] == [TWO_PI]
    bad = subprocess.run([sys.executable, "-m", "ecardioid", "bogus"], capture_output=True, text=True)
    assert bad.returncode == 1 and bad.stdout == ""
