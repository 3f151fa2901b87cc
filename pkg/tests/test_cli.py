import json

import pytest

from skewdich.cli import main
from skewdich.report import validate

FAST_GRID = ["--grid-t", "0:20:12", "--grid-s", "0:20:12"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_ex21_json(capsys):
    code, out, _ = run(capsys, "classify", "--gallery", "ex21", "--alpha1", "-1", "--alpha2", "1", "--json", *FAST_GRID)
    assert code == 0
    rep = validate(out)
    assert rep["verdicts"]["UED"] == "certified"
    assert rep["claims"]["UED"]["agrees"] is True
    assert rep["grid"]["t"]["max"] == 20.0


def test_classify_writes_identical_files(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "classify", "--gallery", "synthetic", "--out", str(a), *FAST_GRID)[0] == 0
    assert run(capsys, "classify", "--gallery", "synthetic", "--out", str(b), *FAST_GRID)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_parse_errors_exit_two(capsys, tmp_path):
    with pytest.raises(SystemExit) as e:
        main(["classify", "--gallery", "nope"])
    assert e.value.code == 2
    assert run(capsys, "classify", "--gallery", "bved", "--grid-t", "1:2")[0] == 2
    assert run(capsys, "classify", "--gallery", "bved", "--alpha1", "-1")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    assert run(capsys, "classify", "--spec", str(bad))[0] == 2
    assert run(capsys, "classify", "--gallery", "bved", "--generator", "{\"kind\": 5}")[0] == 2


def test_incompatible_projectors_exit_three(capsys, tmp_path):
    spec = {
        "name": "oblique",
        "h1": [{"kind": "poly", "coeffs": [0, -2]}],
        "h2": [{"kind": "poly", "coeffs": [0, 2]}],
        "projectors": {"matrix": [[0.5, 0.5], [0.5, 0.5]]},
    }
    path = tmp_path / "oblique.json"
    path.write_text(json.dumps(spec))
    code, _, err = run(capsys, "classify", "--spec", str(path))
    assert code == 3 and "not invariant" in err


def test_criteria_exit_codes(capsys):
    code, out, _ = run(capsys, "criteria", "--gallery", "pure_growth")
    assert code == 4 and "not applicable" in out
    code, out, _ = run(capsys, "criteria", "--gallery", "synthetic", "--json")
    assert code == 0
    assert validate(out)["result"]["status"] == "certified"


def test_falsify(capsys):
    code, out, _ = run(capsys, "falsify", "--gallery", "bved", "--class", "UED", "--witness", "sin-peaks",
                       "--n-max", "8", "--log-n", "10", "--rate", "1e-3", "--beta", "1", "--json")
    assert code == 0
    res = validate(out)["result"]
    assert len(res["margins_log"]) == 8
    code, out, _ = run(capsys, "falsify", "--gallery", "bved", "--class", "UED", "--witness", "sin-peaks",
                       "--n-max", "0", "--json")
    res = validate(out)["result"]
    assert res["margins_log"] == [] and res["verdict"] == "inconclusive"
    code, _, err = run(capsys, "falsify", "--gallery", "bved", "--class", "UED", "--witness", "nope")
    assert code == 2 and "sin-peaks" in err


def test_gallery_list(capsys):
    code, out, _ = run(capsys, "gallery-list", "--json")
    names = [i["name"] for i in validate(out)["result"]]
    assert code == 0 and "ed_gap" in names


def test_compose_check(capsys):
    code, out, _ = run(capsys, "compose-check", "--count", "50", "--json")
    res = validate(out)["result"]
    assert code == 0 and len(res) == 8
    assert all(r["passed"] for r in res.values())
    code, out, _ = run(capsys, "compose-check", "--gallery", "bved", "--count", "20", "--json")
    assert list(validate(out)["result"]) == ["bved"]


def test_spectral_sample(capsys, tmp_path):
    code, out, _ = run(capsys, "spectral-sample", "--mode", "1", "--times", "0,0.1", "--points", "3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "t,y,value" and len(lines) == 7
    assert run(capsys, "spectral-sample", "--mode", "40")[0] == 2
    assert run(capsys, "spectral-sample", "--times", "-1")[0] == 2
    path = tmp_path / "s.csv"
    assert run(capsys, "spectral-sample", "--coeffs", "1,0.5", "--out", str(path))[0] == 0
    assert path.read_text().startswith("t,y,value")
