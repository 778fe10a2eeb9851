import json

import pytest

from symplinv.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_dim(capsys):
    assert run(capsys, "dim", "--m", "2", "--weight", "1,1") == (0, "5\n", "")
    code, out, _ = run(capsys, "dim", "--m", "3", "--weight", "1,0,0", "--format", "json")
    assert code == 0 and json.loads(out) == {"m": 3, "weight": [1, 0, 0], "dim": 6}


@pytest.mark.parametrize("weight", ["0,1", "1", "a,b", "-1,0"])
def test_dim_bad_weight(capsys, weight):
    code, out, err = run(capsys, "dim", "--m", "2", "--weight=" + weight)
    assert code == 2 and out == "" and err.startswith("error:")


def test_classify_cache_byte_identical(capsys, tmp_path):
    argv = ["classify", "--m", "1", "--lambda", "2", "--mu", "2", "--nu", "3", "--order", "1",
            "--cache-dir", str(tmp_path)]
    code, first, _ = run(capsys, *argv)
    assert code == 0 and any(tmp_path.iterdir())
    code, second, _ = run(capsys, *argv)
    assert second == first
    data = json.loads(first)
    assert data["schema"] == "symplinv-classify/1" and data["dimension"] == 1 and data["cumulative"] == 1


def test_classify_env_cache(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("SYMPLINV_CACHE", str(tmp_path))
    run(capsys, "classify", "--m", "1", "--lambda", "0", "--mu", "0", "--nu", "0", "--order", "2", "--no-basis")
    assert any(tmp_path.iterdir())


def test_classify_text(capsys):
    code, out, _ = run(capsys, "classify", "--m", "2", "--lambda", "1,0", "--mu", "1,0", "--nu", "0,0",
                       "--order", "0", "--no-cache", "--format", "text")
    assert code == 0 and out.startswith("dimension 1 (order 0)")


def test_classify_resource_cap(capsys):
    code, _, err = run(capsys, "classify", "--m", "2", "--lambda", "2,1", "--mu", "2,1", "--nu", "2,1",
                       "--order", "1", "--no-cache", "--cap", "5")
    assert code == 3 and "cap" in err


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "--op", "poisson", "--m", "1", "--trials", "3")
    assert code == 0 and json.loads(out)["verdict"] == "pass"
    code, out, _ = run(capsys, "verify", "--op", "broken-product", "--m", "1", "--trials", "3")
    assert code == 1 and json.loads(out)["verdict"] == "fail"
    code, _, err = run(capsys, "verify", "--op", "nonsense", "--m", "1")
    assert code == 2 and "unknown operator" in err


def test_verify_same_seed_same_output(capsys):
    argv = ["verify", "--op", "schouten", "--m", "1", "--k", "1", "--l", "2", "--trials", "2", "--seed", "7"]
    assert run(capsys, *argv) == run(capsys, *argv)


def test_apply_poisson(capsys):
    code, out, _ = run(capsys, "apply", "--op", "poisson", "--m", "1", '{"f": "x1^3", "g": "y1"}', "--format", "text")
    assert code == 0 and out == "3*x1^2\n"
    code, out, _ = run(capsys, "apply", "--op", "poisson", "--m", "1", '{"args": ["x1", "y1"]}')
    data = json.loads(out)
    assert data["schema"] == "symplinv-apply/1" and data["result"] == "1"


def test_apply_dplus_form(capsys, tmp_path):
    f = tmp_path / "form.json"
    f.write_text(json.dumps({"form": {"m": 2, "degree": 1, "coefficients": [{"dirs": [0], "poly": "y2"}]}}))
    code, out, _ = run(capsys, "apply", "--op", "dplus", "--m", "2", "--degree", "1", str(f))
    assert code == 0
    res = json.loads(out)["result"]
    assert res["degree"] == 2 and res["m"] == 2


@pytest.mark.parametrize("payload,needle", [
    ("{not json", "$: malformed JSON"),
    ('{"f": "x1"}', "$: expected keys"),
    ('{"f": "x1 +", "g": "y1"}', "$.f:"),
    ("[1, 2]", "$: expected a JSON object"),
])
def test_apply_errors(capsys, payload, needle):
    code, out, err = run(capsys, "apply", "--op", "poisson", "--m", "1", payload)
    assert code == 2 and out == "" and needle in err


def test_derive_gz(capsys, tmp_path):
    out_file = tmp_path / "gz.json"
    code, out, _ = run(capsys, "derive-gz", "--out", str(out_file))
    assert code == 0 and out == ""
    data = json.loads(out_file.read_text())
    assert data["schema"] == "symplinv-gz/1" and data["matches_frozen_table"]
    code, out, _ = run(capsys, "derive-gz", "--format", "text")
    assert code == 0 and "matches frozen table: True" in out
    assert run(capsys, "derive-gz", "--m", "2")[0] == 2


def test_scan_out(capsys, tmp_path):
    out_file = tmp_path / "scan.json"
    code, out, _ = run(capsys, "scan", "--m", "1", "--max-weight", "1", "--max-order", "1", "--out", str(out_file))
    assert code == 0
    table = json.loads(out_file.read_text())
    assert table["schema"] == "symplinv-scan/1" and table["summary"] == json.loads(out)["summary"]


def test_options_after_subcommand(capsys):
    a = run(capsys, "--format", "json", "dim", "--m", "1", "--weight", "2")
    b = run(capsys, "dim", "--m", "1", "--weight", "2", "--format", "json")
    assert a == b and json.loads(a[1])["dim"] == 3


def test_classify_timing_opt_in(capsys, tmp_path):
    argv = ["classify", "--m", "1", "--lambda", "1", "--mu", "1", "--nu", "2", "--order", "0",
            "--cache-dir", str(tmp_path), "--timing"]
    cold = json.loads(run(capsys, *argv)[1])
    warm = json.loads(run(capsys, *argv)[1])
    assert cold["cache_hit"] is False and warm["cache_hit"] is True
    assert cold["seconds"] == warm["seconds"] >= 0
    plain = json.loads(run(capsys, *argv[:-1])[1])
    assert "seconds" not in plain and "cache_hit" not in plain
