import json

import numpy as np
import pytest

from nsmgreen.cli import SCHEMAS, main, parse_grid, UsageError
from nsmgreen.io import fmt, read_config, read_csv, write_csv


def test_fmt():
    assert fmt(0.1) == "0.1"
    assert fmt(np.float64(1 / 3)) == repr(1 / 3)
    assert fmt(np.int64(7)) == "7"
    assert fmt(np.bool_(True)) == "True"
    assert fmt("x") == "x"
    assert float(fmt(np.pi)) == np.pi


def test_csv_roundtrip(tmp_path):
    rows = [[1, 0.1, "a"], [2, 1e-300, "b"]]
    write_csv(tmp_path / "x.csv", ["i", "v", "s"], rows, "test data")
    comment, header, back = read_csv(tmp_path / "x.csv")
    assert comment == "test data"
    assert header == ["i", "v", "s"]
    assert [[int(a), float(b), c] for a, b, c in back] == rows


def test_config_parsing(tmp_path):
    (tmp_path / "a.cfg").write_text("seed = 3\noutput-dir = foo\n")
    assert read_config(tmp_path / "a.cfg") == {"seed": "3", "output_dir": "foo"}
    (tmp_path / "b.cfg").write_text("[whatever]\nkmin = 0.5\n")
    assert read_config(tmp_path / "b.cfg") == {"kmin": "0.5"}


def test_parse_grid():
    assert np.allclose(parse_grid("log:1:100:3"), [1, 10, 100])
    assert np.allclose(parse_grid("lin:0:1:3"), [0, 0.5, 1])
    assert np.allclose(parse_grid("1,2.5"), [1, 2.5])
    for bad in ["log:0:1:3", "log:1:2", "lin:a:b:c", "1,x"]:
        with pytest.raises(UsageError):
            parse_grid(bad)


def run(tmp_path, *argv):
    return main([*argv, "--output-dir", str(tmp_path)])


def test_roots_command(tmp_path, capsys):
    assert run(tmp_path, "roots", "--r-grid", "log:1e-2:1e2:20") == 0
    comment, header, rows = read_csv(tmp_path / "roots.csv")
    assert header == SCHEMAS["roots"].split(": ")[1].split(",")
    assert len(rows) == 20
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "roots"
    assert "roots.csv" in manifest["outputs"]
    assert any(name.endswith(".svg") for name in manifest["outputs"])
    assert "roots: PASS" in capsys.readouterr().out


def test_no_plots(tmp_path):
    assert run(tmp_path, "roots", "--r-grid", "1,2,3", "--no-plots") == 0
    assert not list(tmp_path.glob("*.svg"))


def test_green_command(tmp_path):
    assert run(tmp_path, "green", "--norm-grid", "log:1e-2:10:8", "--no-plots") == 0
    _, header, rows = read_csv(tmp_path / "green_checks.csv")
    assert header == ["check", "value", "tolerance", "passed"]
    assert all(r[3] == "True" for r in rows)


def test_reruns_are_bit_identical(tmp_path):
    argv = ["verify-oracle", "--n-magnitudes", "3", "--n-directions", "1", "--t-grid", "0.1,1", "--no-plots", "--seed", "7"]
    assert main(argv + ["--output-dir", str(tmp_path / "a")]) == 0
    assert main(argv + ["--output-dir", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "oracle.csv").read_bytes() == (tmp_path / "b" / "oracle.csv").read_bytes()
    ma = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert ma["seed"] == 7
    assert ma["config"]["n_magnitudes"] == 3


def test_failed_check_exits_one(tmp_path, capsys):
    code = run(tmp_path, "verify-oracle", "--n-magnitudes", "2", "--n-directions", "1", "--t-grid", "1", "--threshold", "0", "--no-plots")
    assert code == 1
    assert "FAIL" in capsys.readouterr().err


def test_usage_errors_exit_two(tmp_path):
    assert run(tmp_path, "roots", "--params", "nonsense") == 2
    assert run(tmp_path, "lyapunov", "--params", "nonsense") == 2
    assert run(tmp_path, "roots", "--a", "-1") == 2
    assert run(tmp_path, "roots", "--seed", "x") == 2
    (tmp_path / "bad.cfg").write_text("colour = blue\n")
    assert run(tmp_path, "roots", "--config", str(tmp_path / "bad.cfg")) == 2
    assert main(["frobnicate"]) == 2
    assert main([]) == 2


def test_config_then_flags(tmp_path):
    (tmp_path / "c.cfg").write_text("r_grid = 1,2\nno_plots = true\n")
    assert run(tmp_path, "roots", "--config", str(tmp_path / "c.cfg"), "--r-grid", "1,2,3") == 0
    _, _, rows = read_csv(tmp_path / "roots.csv")
    assert len(rows) == 3
    assert not list(tmp_path.glob("*.svg"))


def test_help_shows_schema(capsys):
    assert main(["bounds", "--help"]) == 0
    assert "bounds_summary.csv: check,value,tolerance,passed" in capsys.readouterr().out


def test_lyapunov_small(tmp_path):
    assert run(tmp_path, "lyapunov", "--k-points", "6", "--t-grid", "lin:0:50:6", "--modes", "1", "--no-plots") == 0
    _, header, rows = read_csv(tmp_path / "lyapunov_summary.csv")
    assert header == ["kappa1", "kappa2", "c_eq", "margin", "max_trajectory_ratio"]
    assert float(rows[0][3]) > 0
