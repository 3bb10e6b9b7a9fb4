import csv
import json
import math
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from fracgls.cli import GRID_MARGIN, ConfigError, emit_plot, format_number, parse_grid, parse_psi, run


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# -- helpers -----------------------------------------------------------------

def test_parse_grid_forms():
    assert parse_grid("0.1:0.9:9", "--s-grid") == pytest.approx(np.linspace(0.1, 0.9, 9))
    assert parse_grid("1,2.5", "--p-grid") == [1.0, 2.5]
    assert parse_grid("3", "--p-grid") == [3.0]


def test_parse_grid_open_bounds():
    vals = parse_grid("0:1:5", "--s-grid", lo=0.0, hi=1.0)
    assert vals[0] == pytest.approx(GRID_MARGIN) and vals[-1] == pytest.approx(1 - GRID_MARGIN)
    with pytest.raises(ConfigError, match="--s-grid"):
        parse_grid("0.5,2", "--s-grid", lo=0.0, hi=1.0)


@pytest.mark.parametrize("text", ["", "a:b:c", "1:2", "1:2:0", "x,y", "1,inf"])
def test_parse_grid_rejects(text):
    with pytest.raises(ConfigError) as err:
        parse_grid(text, "--p-grid")
    assert err.value.field == "--p-grid"


def test_parse_psi():
    assert parse_psi("const:2:1:3")(2.0) == 2.0
    assert parse_psi("power:1:1:inf")(5.0) == 5.0
    assert parse_psi("degenerate:2").kind == "degenerate"
    for bad in ("const:1:3:1", "cubic:1", "degenerate"):
        with pytest.raises(ConfigError):
            parse_psi(bad)


def test_format_number():
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(math.inf) == "inf" and format_number(-math.inf) == "-inf"
    assert format_number(float("nan")) == "nan"
    assert format_number(True) == "true" and format_number(3) == "3" and format_number(None) == ""


def test_emit_plot_is_wellformed_and_stable(tmp_path):
    rows = [dict(n=1, s=s, K=1 + s, K_asymptote=2 / (1 - s)) for s in (0.1, 0.5, 0.9)]
    a = emit_plot(rows, "K-vs-s", tmp_path / "a.svg")
    b = emit_plot(rows, "K-vs-s", tmp_path / "b.svg")
    root = ET.parse(a).getroot()
    assert root.tag.endswith("svg")
    assert a.read_bytes() == b.read_bytes()
    with pytest.raises(ConfigError):
        emit_plot([], "K-vs-s", tmp_path / "c.svg")
    with pytest.raises(ConfigError):
        emit_plot(rows, "pie", tmp_path / "c.svg")


# -- commands ----------------------------------------------------------------

def test_constants_K_table(tmp_path, capsys):
    assert run(["constants", "--K", "--n", "3", "--s-grid", "0.1:2.9:29", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "constants-K.csv")
    assert len(rows) == 29
    one = next(r for r in rows if float(r["s"]) == pytest.approx(1.0))
    assert float(one["K"]) == pytest.approx(2.324894703019253, rel=1e-14)
    ET.parse(tmp_path / "constants-K-K-vs-s.svg")
    man = json.loads((tmp_path / "constants.manifest.json").read_text())
    for key in ("argv", "config", "seed", "versions", "wall_time_s", "exit_status", "tables", "plots"):
        assert key in man
    assert man["exit_status"] == 0
    assert "constants-K.csv" in man["tables"]


def test_constants_L_and_Z(tmp_path):
    assert run(["constants", "--L", "--Z", "--alpha-grid", "1.5", "--p-offsets", "1.5",
                "--out", str(tmp_path), "--no-plot"]) == 0
    L = read_csv(tmp_path / "constants-L.csv")
    assert float(L[0]["L"]) == pytest.approx(0.017645695041418212, rel=1e-11)
    assert float(L[0]["case_C_upper"]) >= float(L[0]["L"])
    Z = read_csv(tmp_path / "constants-Z.csv")
    for r in Z:
        assert float(r["upper"]) / float(r["lower"]) == pytest.approx(float(r["n"]))
    assert not list(tmp_path.glob("*.svg"))


def test_csv_is_byte_identical_across_runs(tmp_path):
    argv = ["verify", "--ineq", "sobolev", "--family", "gaussian", "--n", "1", "--s", "0.5",
            "--p", "conformal", "--no-plot", "--seed", "7"]
    assert run(argv + ["--out", str(tmp_path / "a")]) == 0
    assert run(argv + ["--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "verify-sobolev.csv").read_bytes()
    assert a == (tmp_path / "b" / "verify-sobolev.csv").read_bytes()
    row = read_csv(tmp_path / "a" / "verify-sobolev.csv")[0]
    assert row["status"] == "ok" and row["asserted"] == "true"


def test_verify_negative_control_is_measured(tmp_path):
    assert run(["verify", "--ineq", "dilation", "--q-mismatch", "6", "--out", str(tmp_path), "--no-plot"]) == 0
    rows = read_csv(tmp_path / "verify-dilation.csv")
    assert len(rows) == 4 and all(r["status"] == "measured" for r in rows)


def test_verify_weighted_named_function(tmp_path):
    assert run(["verify", "--ineq", "weighted", "--function", "x-exp", "--alpha", "1.5", "--p", "2",
                "--out", str(tmp_path), "--no-plot"]) == 0
    row = read_csv(tmp_path / "verify-weighted.csv")[0]
    assert float(row["lhs"]) == pytest.approx(0.559757567460214, rel=1e-9)


def test_probe_and_report(tmp_path):
    assert run(["probe", "--n", "1", "--s", "0.5", "--family", "conformal-bubble", "--out", str(tmp_path)]) == 0
    row = read_csv(tmp_path / "probe.csv")[0]
    assert float(row["ratio_over_sharp"]) == pytest.approx(1.0, abs=1e-6)
    assert read_csv(tmp_path / "probe-samples.csv")
    man = json.loads((tmp_path / "probe.manifest.json").read_text())
    assert man["findings"]
    assert run(["report", "--out", str(tmp_path)]) == 0
    files = {r["file"] for r in read_csv(tmp_path / "report.csv")}
    assert "probe.csv" in files


@pytest.mark.parametrize("argv,field", [
    (["constants", "--K", "--s-grid", "oops"], "--s-grid"),
    (["constants", "--K", "--n", "1", "--s-grid", "0.5,1.5"], "--s-grid"),
    (["verify", "--ineq", "gl-sobolev", "--psi", "cubic:1"], "--psi"),
    (["verify", "--ineq", "weighted", "--function", "sinc"], "--function"),
    (["verify", "--ineq", "sobolev", "--n", "7"], "--n"),
    (["verify", "--ineq", "sobolev", "--family", "gaussian", "--param", "sigma"], "--param"),
    (["report", "--source", "/nonexistent/dir"], "--source"),
])
def test_config_errors_exit_2(tmp_path, capsys, argv, field):
    assert run(argv + ["--out", str(tmp_path), "--no-plot"]) == 2
    assert field in capsys.readouterr().err


def test_argparse_errors_exit_2(tmp_path):
    assert run(["verify", "--out", str(tmp_path)]) == 2
    assert run(["bogus"]) == 2
    assert run(["verify", "--ineq", "nope", "--out", str(tmp_path)]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fracgls.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "constants" in proc.stdout
