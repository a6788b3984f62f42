import json
import subprocess
import sys

import pytest

from curvepoints.cli import main
from curvepoints.oracles import count_squarefree_trial


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_enumerate_json_lines(capsys):
    code, out, _ = run(capsys, "enumerate", "--curve", "sqrt", "--N", "100", "--delta", "0.05")
    assert code == 0
    lines = out.splitlines()
    assert json.loads(lines[0])["count"] == 14 == len(lines) - 1


def test_enumerate_csv_and_text(capsys):
    code, out, _ = run(capsys, "enumerate", "--curve", "sqrt", "--N", "100", "--delta", "1/20", "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "n,m,offset,distance" and len(out.splitlines()) == 15
    code, out, _ = run(capsys, "enumerate", "--curve", "sqrt", "--N", "100", "--delta", "1/20", "--format", "text")
    assert code == 0 and "100" in out


def test_hs_bound_has_nonnegative_margin(capsys):
    code, out, _ = run(capsys, "bound", "--theorem", "hs", "--branch", "2", "--curve", "sqrt",
                       "--N", "10000", "--delta", "0.01", "--k", "3")
    assert code == 0
    reports = json.loads(out)["reports"]
    assert all(r["margin"] >= 0 for r in reports)


def test_withheld_hypothesis_exit_code(capsys):
    code, _, _ = run(capsys, "bound", "--theorem", "all", "--curve", "sqrt", "--N", "10000", "--delta", "0.01")
    assert code == 3


def test_config_errors(capsys):
    assert run(capsys, "enumerate", "--curve", "sqrt", "--N", "100", "--delta", "0.3")[0] == 2
    assert run(capsys, "enumerate", "--curve", "nosuch", "--N", "100", "--delta", "0.1")[0] == 2
    assert run(capsys, "enumerate", "--curve", "sqrt", "--N", "100", "--delta", "0.1", "--precision", "32")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["enumerate", "--curve", "sqrt", "--delta", "abc"])
    assert info.value.code == 2


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"P": 10, "theta": "1/2"}))
    code, out, _ = run(capsys, "dioph", "--config", str(cfg))
    assert code == 0 and json.loads(out)["brute"] == 4
    cfg.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(SystemExit):
        main(["dioph", "--config", str(cfg)])


def test_squarefree_counts_only(capsys):
    code, out, _ = run(capsys, "squarefree", "--x", "100", "48", "--y", "16", "--counts-only")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [r["count"] for r in rows] == [12, count_squarefree_trial(49, 64)]


def test_arcs_report(capsys):
    code, out, _ = run(capsys, "arcs", "--curve", "sqrt", "--N", "4096", "--delta", "0.05")
    assert code == 0
    payload = json.loads(out)
    assert payload["arcs"] and payload["S0"] + payload["T0"] > 0


def test_output_is_byte_identical(tmp_path):
    argv = [sys.executable, "-m", "curvepoints.cli", "arcs", "--curve", "three-halves", "--N", "512",
            "--delta", "0.1", "--seed", "42"]
    outs = []
    for i in range(2):
        path = tmp_path / f"out{i}.json"
        subprocess.run(argv + ["--output", str(path)], check=True)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] and outs[0]


def test_verify_single_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "dioph", "--seed", "42")
    assert code == 0
    payload = json.loads(out)
    assert payload["passed"] and payload["results"][0]["criterion"] == 8
