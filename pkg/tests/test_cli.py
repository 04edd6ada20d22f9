import json

import pytest

from zetalab.cli import auto_x, main
from zetalab.zeros import default_threads

from conftest import DATA


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_zeros_find(capsys):
    doc = run_json(capsys, "zeros", "find", "--t-max", "100")
    assert doc["command"] == "zeros"
    assert doc["report"]["n_zeros"] == 29
    assert doc["report"]["first"][0] == pytest.approx(14.134725141734694, abs=1e-9)
    assert doc["config"]["t_max"] == 100.0


def test_zeros_roundtrip(capsys, tmp_path):
    f = tmp_path / "z.txt"
    run_json(capsys, "zeros", "find", "--t-max", "60", "--out-file", str(f))
    doc = run_json(capsys, "zeros", "ingest", "--file", str(f))
    assert doc["report"]["n_zeros"] == 13


def test_lg_sum_non_prime_power(capsys):
    doc = run_json(capsys, "lg-sum", "--x", "6", "--t", "1000")
    assert doc["report"]["main_term"] == 0.0
    assert doc["report"]["n_zeros"] == 649


def test_clt_on_ingested_reference(capsys):
    ref = str(DATA / "reference_zeros_29.txt")
    doc = run_json(capsys, "clt", "--zeros", ref, "--X", "10", "--intervals=-1:1,0:inf")
    rep = doc["report"]
    assert rep["n"] == 29
    assert [row[:2] for row in rep["interval_probs"]] == [[-1.0, 1.0], [0.0, None]]


def test_smoothing_check(capsys):
    doc = run_json(capsys, "smoothing-check", "--omega", "1", "--grid=-5:5:400")
    assert doc["report"]["c_fit"] <= 1.5
    assert doc["report"]["indicator"]["c_fit"] <= 1.5


def test_oracle_aj(capsys):
    doc = run_json(capsys, "oracle", "aj", "--primes", "2,3", "--j", "2")
    rep = doc["report"]
    assert rep["counts"] == {"4": 1, "6": 2, "9": 1}
    assert rep["identity"]["equal"] is True
    assert rep["identity"]["lhs"] == {"numerator": 25, "denominator": 36, "value": 25 / 36}


def test_random_model_small(capsys):
    doc = run_json(capsys, "random-model", "--X", "5", "--samples", "20000")
    rep = doc["report"]
    assert rep["n_primes"] == 9
    assert all(abs(r["z"]) < 5 for r in rep["moments"])


def test_config_file_with_override(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"t_max": 50.0, "X": 12, "seed": 5}))
    doc = run_json(capsys, "zeros", "find", "--config", str(cfg), "--seed", "9")
    assert doc["config"]["t_max"] == 50.0
    assert doc["config"]["X"] == 12.0 and doc["config"]["X_mode"] == "fixed"
    assert doc["config"]["seed"] == 9
    assert doc["report"]["n_zeros"] == 10


def test_auto_x_floor(capsys):
    assert auto_x(1000.0) == 10.0
    assert auto_x(74920.9) == 10.0  # non-integer height just above a sieve boundary
    doc = run_json(capsys, "zeros", "find", "--t-max", "100")
    assert doc["config"]["X_mode"] == "auto" and doc["config"]["X"] == 10.0


def test_pair_corr_csv(capsys):
    code, out, _ = run(capsys, "pair-corr", "--t-max", "1000", "--bins", "10")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "center,density,conjectured,count"
    assert len(lines) == 11


def test_output_file(capsys, tmp_path):
    f = tmp_path / "out.json"
    code, out, _ = run(capsys, "oracle", "aj", "--output", str(f))
    assert code == 0 and out == ""
    assert json.loads(f.read_text())["command"] == "oracle"


def _error(err):
    return json.loads(err.strip().splitlines()[-1])


def test_usage_errors(capsys):
    code, _, err = run(capsys, "lg-sum", "--x", "2", "--t", "100", "--X", "1")
    assert code == 2 and _error(err)["exit_code"] == 2
    code, _, err = run(capsys, "lg-sum", "--x", "1", "--t", "100")
    assert code == 2 and _error(err)["error"] == "DomainError"
    with pytest.raises(SystemExit) as exc:
        main(["lg-sum", "--x", "2"])
    assert exc.value.code == 2
    assert _error(capsys.readouterr().err)["error"] == "UsageError"


def test_data_errors(capsys, tmp_path):
    code, _, err = run(capsys, "clt", "--zeros", str(tmp_path / "missing.txt"))
    assert code == 3 and _error(err)["exit_code"] == 3
    bad = tmp_path / "bad.txt"
    bad.write_text("14.13\n12.0\n")
    code, _, err = run(capsys, "zeros", "ingest", "--file", str(bad))
    assert code == 3
    cfg = tmp_path / "c.json"
    cfg.write_text('{"colour": 1}')
    assert run(capsys, "zeros", "find", "--config", str(cfg))[0] == 3


def test_numerical_errors(capsys):
    ref = str(DATA / "reference_zeros_29.txt")
    code, _, err = run(capsys, "lg-sum", "--zeros", ref, "--x", "2", "--t", "500")
    assert code == 4
    assert _error(err)["error"] == "InsufficientZerosError"


def test_threads_env(monkeypatch):
    monkeypatch.setenv("ZETALAB_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.setenv("ZETALAB_THREADS", "junk")
    assert default_threads() == 1
    monkeypatch.delenv("ZETALAB_THREADS")
    assert default_threads() == 1


def test_json_is_byte_identical(tmp_path):
    argv = ["random-model", "--X", "10", "--samples", "30000", "--seed", "7"]
    f = tmp_path / "r.json"  # the output path is part of the embedded config
    assert main(argv + ["--output", str(f)]) == 0
    first = f.read_bytes()
    assert main(argv + ["--output", str(f)]) == 0
    assert f.read_bytes() == first
