import csv
import io
import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from frht_lab.cli import main, parse_angle, parse_eps_grid
from frht_lab.functions import gaussian_bessel
from frht_lab.output import render_csv, render_json


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_angle():
    assert parse_angle("pi/4") == math.pi / 4
    assert parse_angle("2pi/5") == 2 * math.pi / 5
    assert parse_angle("3*pi/4") == 3 * math.pi / 4
    assert parse_angle("0.5") == 0.5
    np.testing.assert_allclose(parse_eps_grid("2:6:2"), [0.1, 0.01, 0.001])


def test_transform_eigenfunction(capsys):
    code, out, _ = run(["transform", "--alpha", "1.5707963", "--mu0", "0", "--f", "gaussian_bessel:0",
                        "--xi", "0.5:4:8"], capsys)
    assert code == 0
    r = rows(out)
    assert list(r[0]) == ["xi", "re_value", "im_value", "abs_error_estimate", "re_f_at_xi", "im_f_at_xi"]
    re = np.array([float(x["re_value"]) for x in r])
    xi = np.array([float(x["xi"]) for x in r])
    np.testing.assert_allclose(re, gaussian_bessel(0)(xi), atol=1e-6)


def test_transform_errors(capsys):
    code, _, err = run(["transform", "--alpha", "pi/4"], capsys)
    assert code == 2 and "--f" in err
    code, _, err = run(["transform", "--alpha", "0.001", "--f", "gaussian_bessel:0"], capsys)
    assert code == 2 and "admissible band" in err
    code, _, _ = run(["transform", "--f", "nosuch:1"], capsys)
    assert code == 2
    code, _, _ = run(["transform", "--bogus"], capsys)
    assert code == 2


def test_roundtrip_single_and_truncated(capsys):
    code, out, _ = run(["roundtrip", "--alpha", "pi/3", "--f", "gaussian_bessel:0"], capsys)
    assert code == 0 and rows(out)[0]["passed"] == "true"
    code, _, err = run(["roundtrip", "--alpha", "pi/3", "--f", "gaussian_bessel:0", "--xi-max", "2"], capsys)
    assert code == 3 and "tail mass" in err
    code, out, _ = run(["roundtrip", "--alpha", "1.5707963267948966", "--f", "laguerre_bessel:0,1"], capsys)
    assert code == 0


def test_seminorm_rows(capsys):
    code, out, _ = run(["seminorm", "--f", "gaussian_bessel:0", "--mu", "0"], capsys)
    assert code == 0
    r = rows(out)
    beta = [x for x in r if x["kind"] == "beta_mk"]
    assert len(beta) == 1
    # gamma^(1/2)_(0,0) of x^(1/2) exp(-x^2/2) is sup x^(-1/2) exp(-x^2/2): divergent at 0
    assert beta[0]["value"] == "inf" and "unbounded" in beta[0]["warning"]
    code, out, _ = run(["seminorm", "--f", "zero", "--mu", "1"], capsys)
    assert all(float(x["value"]) == 0.0 for x in rows(out))


def test_seminorm_order_check(capsys):
    code, out, _ = run(["seminorm", "--f", "power_cutoff:7.5", "--mu", "0", "--order-check", "true"], capsys)
    chk = [x for x in rows(out) if x["kind"] == "order_check"][0]
    assert chk["passed"] == chk["monotone"] == chk["intermediate"] == "true"
    assert code == 0


def test_abelian_default_and_controls(capsys):
    code, out, _ = run(["abelian", "--eps-grid", "2:6:2"], capsys)
    assert code == 0
    assert "slope_so_far" in rows(out)[0]
    code, _, err = run(["abelian", "--eps-grid", "2:6:2", "--L", "log"], capsys)
    assert code == 1 and "drift" in err
    code, out, err = run(["abelian", "--eps-grid", "4:4:1"], capsys)
    assert code == 0 and "slope_so_far" not in rows(out)[0] and "no slope" in err
    code, _, _ = run(["abelian", "--f", "gaussian_bessel:0"], capsys)
    assert code == 2


def test_tauberian(capsys, tmp_path):
    out = tmp_path / "t.json"
    code, _, _ = run(["tauberian", "--xi", "0.5:5:3", "--format", "json", "--out", str(out)], capsys)
    data = json.loads(out.read_text())
    assert code == 0 and data["metadata"]["passed_i"] and data["metadata"]["passed_ii"]
    assert len(data["rows"]) == 3 and "re_M_xi" in data["rows"][0]
    code, _, _ = run(["tauberian", "--xi", "0.5:5:3", "--C-max", "0"], capsys)
    assert code == 1
    code, _, _ = run(["tauberian", "--xi", "0.5:5:0"], capsys)
    assert code == 2


def test_montel(capsys):
    code, out, _ = run(["montel", "--n-list", "1"], capsys)
    assert code == 0
    code, _, err = run(["montel", "--grid", "0.5:2:100"], capsys)
    assert code == 3 and "cover" in err


def test_check_sv(capsys):
    code, out, _ = run(["check-sv", "--a-set", "0.5,2"], capsys)
    assert code == 0
    code, _, _ = run(["check-sv", "--L", "power:0.1", "--a-set", "2"], capsys)
    assert code == 1


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[common]\nalpha = pi/3\nmu0 = 1\nf = gaussian_bessel:1\n\n[transform]\nxi = 0.5:2:4\n")
    code, out, _ = run(["transform", "--config", str(cfg)], capsys)
    assert code == 0 and len(rows(out)) == 4
    code, out2, _ = run(["transform", "--config", str(cfg), "--xi", "0.5:2:2"], capsys)
    assert len(rows(out2)) == 2
    bad = tmp_path / "bad.ini"
    bad.write_text("[transform]\nxii = 1\n")
    code, _, err = run(["transform", "--config", str(bad), "--f", "zero"], capsys)
    assert code == 2 and "unknown key" in err
    code, _, _ = run(["transform", "--config", str(tmp_path / "missing.ini")], capsys)
    assert code == 2


def test_atomic_write_leaves_no_temp(tmp_path, capsys):
    out = tmp_path / "r.csv"
    out.write_text("old")
    code, _, _ = run(["check-sv", "--a-set", "2", "--out", str(out)], capsys)
    assert code == 0 and out.read_text().startswith("a,eps,deviation")
    assert os.listdir(tmp_path) == ["r.csv"]


def test_csv_format_rules():
    text = render_csv([{"x": 0.1, "z": 1 + 2j, "b": True, "v": math.inf}])
    assert text.splitlines()[0] == "x,re_z,im_z,b,v"
    assert text.splitlines()[1] == "0.10000000000000001,1,2,true,inf"
    assert render_csv([]) == "\n"
    j = json.loads(render_json([{"v": math.nan}], {"m": np.float64(1.5)}))
    assert j["rows"][0]["v"] == "nan" and j["metadata"]["m"] == 1.5


def test_console_script_determinism(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[common]\nalpha = pi/4\nformat = json\n[abelian]\neps_grid = 2:4:1\n")
    outs = []
    for i in range(2):
        path = tmp_path / f"o{i}.json"
        res = subprocess.run([sys.executable, "-m", "frht_lab.cli", "abelian", "--config", str(cfg),
                              "--eps-grid", "2:4:1", "--out", str(path)], capture_output=True)
        assert res.returncode == 0, res.stderr
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
