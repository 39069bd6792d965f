import json
from fractions import Fraction
from math import factorial

import pytest

from clusterbench import cli
from clusterbench.blc import BasicLinearCombination


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_counts(capsys):
    code, out, _ = run(capsys, "counts", "--n-max", "10", "--enumerate-max", "7")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "n,count_tr,count_tr0,enumerated_tr,enumerated_tr0"
    assert lines[6] == "7,157,55,157,55"
    assert lines[-1] == "10,14047,6213,,"


def test_counts_limits(capsys):
    assert run(capsys, "counts", "--n-max", "40")[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["counts", "--enumerate-max", "9"])
    assert exc.value.code == 2


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--identity", "partition", "--n", "4")
    assert code == 0 and json.loads(out)["holds"] is True
    assert run(capsys, "verify", "--identity", "rh", "--n", "5")[0] == 0
    code, _, err = run(capsys, "verify", "--identity", "tree", "--n", "7")
    assert code == 2 and "2 <= n <= 6" in err


def test_verify_failure_exit(capsys, monkeypatch):
    from clusterbench import symbolic
    from clusterbench.graphs import Edge

    monkeypatch.setitem(cli.IDENTITIES, "tree",
                        lambda n: symbolic.IdentityResult(False, frozenset({Edge(1, 2)}), 1, 0))
    code, out, _ = run(capsys, "verify", "--identity", "tree", "--n", "3")
    assert code == 1 and json.loads(out)["witness"] == ["1-2"]


def test_criteria(capsys):
    code, out, _ = run(capsys, "criteria", "--rep", "rh", "--n", "6", "--criterion", "3")
    data = json.loads(out)
    assert code == 0 and data["score"] == 230 and data["complete"] is True
    code, out, _ = run(capsys, "criteria", "--rep", "tree-b", "--n", "8", "--collection")
    assert json.loads(out)["score"] == 857
    assert run(capsys, "criteria", "--rep", "tree-b", "--n", "10", "--collection", "--criterion", "2")[0] == 2


def test_tables(capsys, tmp_path):
    path = tmp_path / "t.csv"
    assert run(capsys, "tables", "--table", "4", "--format", "csv", "-o", str(path))[0] == 0
    text = path.read_text()
    assert "4,TR,10,17056,17756,mismatch" in text
    code, out, _ = run(capsys, "tables", "--table", "1", "--format", "json")
    rows = json.loads(out)
    assert rows[0]["citation"] == "table1:TR"
    assert "### Table 3" in run(capsys, "tables", "--table", "3")[1]


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_transform(capsys, tmp_path):
    b = {str(n): f"{(-n) ** (n - 1)}/{factorial(n)}" for n in range(1, 11)}
    path = _write(tmp_path, "b.json", {"family": "b", "values": b})
    code, out, _ = run(capsys, "transform", "--input", path)
    data = json.loads(out)
    assert code == 0 and data["value"] == "1" and data["within_bound"] and data["paper_bound"] == 2440
    code, out, _ = run(capsys, "transform", "--input", path, "--to", "a")
    a = json.loads(out)
    assert a["values"]["3"] == "1/6"
    apath = _write(tmp_path, "a.json", a)
    data = json.loads(run(capsys, "transform", "--input", apath)[1])
    assert data["value"] == "1" and data["ops_counted"] < 21000 and data["paper_bound"] == 21000
    assert run(capsys, "transform", "--input", apath, "--to", "a")[0] == 2


def test_transform_float_errors(capsys, tmp_path):
    vec = {"family": "b", "values": {"1": 1, "2": -1.0, "3": 1.5}, "errors": {"2": 0.01, "3": 0.02}}
    data = json.loads(run(capsys, "transform", "--input", _write(tmp_path, "f.json", vec))[1])
    assert data["value"] == pytest.approx(1.0) and data["std_error"] > 0


def test_estimate_deterministic(capsys, tmp_path):
    args = ["estimate", "--rep", "blocks", "--n", "3", "--samples", "100000", "--seed", "4"]
    first = run(capsys, *args)[1]
    assert first == run(capsys, *args)[1]
    data = json.loads(first)
    assert abs(data["value"] - 1.0) < 3 * data["std_error"]
    many = json.loads(run(capsys, *args, "--workers", "3")[1])
    assert many["value"] == data["value"]


def test_estimate_config_file(capsys, tmp_path):
    cfg = _write(tmp_path, "c.json", {"rep": "tree-b", "n": 2, "samples": 5000, "seed": 1})
    data = json.loads(run(capsys, "estimate", "--config", cfg)[1])
    assert data["value"] == pytest.approx(-1.0)
    assert data["config"]["rep"] == "tree-b"
    bad = _write(tmp_path, "bad.json", {"sample": 3})
    assert run(capsys, "estimate", "--config", bad)[0] == 2


def test_ingest_frame(capsys, tmp_path):
    frame = tmp_path / "frame.txt"
    frame.write_text("n=3; s=1-2,2-3,1-3; ad=\nn=4; s=1-2,2-3,3-4,1-4; ad=1-3\n")
    code, out, _ = run(capsys, "ingest-frame", "--file", str(frame), "--blc-dir", str(tmp_path))
    data = json.loads(out)
    assert code == 0 and data[0]["cr1_matches_printed"] and data[1]["cr1"] == 1
    L = BasicLinearCombination.from_json((tmp_path / "frame_n4.json").read_text())
    assert L.prefactor == Fraction(-3, 24)
    est = json.loads(run(capsys, "estimate", "--rep", "frame-file", "--frame", str(frame), "--n", "3",
                         "--samples", "1000")[1])
    assert abs(est["value"] - 1.0) < 4 * est["std_error"]
    frame.write_text("n=4; s=1-2,2-3,3-4; ad=1-3\n")
    code, _, err = run(capsys, "ingest-frame", "--file", str(frame))
    assert code == 2 and "biconnected" in err


def test_json_outputs_roundtrip(capsys):
    out = run(capsys, "criteria", "--rep", "tree-a", "--n", "5")[1]
    assert json.dumps(json.loads(out), indent=2, sort_keys=True) + "\n" == out
