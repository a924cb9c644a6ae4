import json
from pathlib import Path

import pytest

from cytwist.cli import _budget, main
from cytwist.varieties import CATALOG

ROOT = Path(__file__).resolve().parents[1]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eta_json(capsys):
    code, out, _ = run(capsys, "eta", "--spec", "3:8", "--precision", "7", "--label", "v33", "--level", "9")
    assert code == 0
    assert json.loads(out) == {"label": "v33", "level": 9, "coeffs": ["1", "0", "0", "-8", "0", "0", "20"]}


def test_eta_csv(capsys, tmp_path):
    path = tmp_path / "e.csv"
    assert main(["eta", "--spec", "1:4,5:4", "--precision", "3", "--format", "csv", "-o", str(path)]) == 0
    assert path.read_text().splitlines() == ["n,c_n", "1,1", "2,-4", "3,2"]


def test_twist_form(capsys):
    code, out, _ = run(capsys, "twist-form", "--form", "beauville-III", "--d", "-1", "--pmax", "20", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["twisted_level"] == 80 and data["verdict"] == "exact-pass"
    code, out, _ = run(capsys, "twist-form", "--form", "beauville-I", "--d", "-3", "--pmax", "20", "--format", "json")
    assert json.loads(out)["twisted_level"] == "no simple answer"


def test_count(capsys):
    code, out, _ = run(capsys, "count", "--variety", "schoen-quintic", "--p", "2")
    row = json.loads(out)
    assert row["count"] == 16 and row["variety"] == "schoen-quintic"
    code, out, _ = run(capsys, "count", "--variety", "beauville-V", "--p", "5", "--d", "-3")
    assert json.loads(out)["fibers"] == [12, 4, 8, 8, 4, 15]


def test_count_errors(capsys):
    code, _, err = run(capsys, "count", "--variety", "nope", "--p", "3")
    assert code == 2 and "unknown variety" in err
    code, _, err = run(capsys, "count", "--variety", "v24", "--p", "9")
    assert code == 2


def test_sign(capsys):
    code, out, _ = run(capsys, "sign", "--variety", "vgn")
    assert code == 0 and "sign: -1" in out and "16*y0*y1*y2*y3" in out
    code, out, _ = run(capsys, "sign", "--variety", "v24", "--i0", "x0", "--I", "x1,x2")
    assert "sign: -1" in out
    code, out, _ = run(capsys, "sign", "--variety", "schoen-quintic", "--involution", "identity")
    assert "sign: +1" in out


def test_verify_writes_report(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "--family", "double-octic-template", "--d", "-1", "--pmax", "19",
                       "--report", str(path))
    assert code == 0 and "exact-pass" in out
    assert json.loads(path.read_text())["verdict"] == "exact-pass"


def test_verify_with_coefficient_file(capsys, tmp_path):
    path = tmp_path / "r.csv"
    code, out, _ = run(capsys, "verify", "--family", "schoen-quintic", "--d", "2", "--pmax", "19",
                       "--coefficients", f"schoen-25={ROOT / 'tests/data/schoen_25_ap.json'}", "--report", str(path))
    assert code == 0
    assert path.read_text().startswith("family,d,p,chi,n_base,n_twist,delta,a_p,residual,verdict")


def test_run_config(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"families": ["elliptic-calibration", "missing"], "d": [5], "pmax": 23}))
    out_path = tmp_path / "out.json"
    code, out, err = run(capsys, "run", "--config", str(cfg), "-o", str(out_path))
    assert code == 0 and "exact-pass" in out and "missing" in err
    assert json.loads(out_path.read_text())["schema"] == "cytwist.batch/1"


def test_minimality(capsys):
    code, out, _ = run(capsys, "minimality", "--form", "schoen-25", "--candidates", "level5",
                       "--coefficients", f"schoen-25={ROOT / 'tests/data/schoen_25_ap.json'}")
    assert "level5 is not a quadratic twist" in out and "-84" in out


def test_defs_override(capsys):
    saved = dict(CATALOG)
    try:
        code, out, _ = run(capsys, "--defs", str(ROOT / "definitions/schoen_uv.def"), "count",
                           "--variety", "schoen-uv", "--p", "7", "--d", "-1")
        assert json.loads(out)["count"] == 399
    finally:
        CATALOG.clear()
        CATALOG.update(saved)


@pytest.mark.parametrize("text,value", [("1024", 1024), ("2^10", 1024), ("2**33", 2**33)])
def test_budget_parsing(text, value):
    assert _budget(text) == value
