from __future__ import annotations

import json
import subprocess
import sys

import pytest

from inducilab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_sample_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["sample", "--factors", "5", "--p", "0.5", "--seed", "7", "--out-prefix", str(a)]) == 0
    assert main(["sample", "--factors", "5", "--p", "0.5", "--seed", "7", "--out-prefix", str(b)]) == 0
    out = capsys.readouterr().out
    first, second = out[: len(out) // 2], out[len(out) // 2:]
    assert first == second
    for ext in (".json", ".g6"):
        assert (tmp_path / f"a{ext}").read_bytes() == (tmp_path / f"b{ext}").read_bytes()
    doc = json.loads(first)
    assert doc["order"] == 5 and doc["degree"] in (0, 2, 4)


def test_bad_probability_is_usage_error(capsys):
    with pytest.raises(SystemExit) as e:
        main(["sample", "--factors", "5", "--p", "1.5"])
    assert e.value.code == 64


def test_unknown_command_is_usage_error(capsys):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 64


def test_count(capsys):
    code, doc = run(capsys, "count", "C5", "C5")
    r = doc["result"]
    assert code == 0 and (r["emb"], r["aut"], r["ind"]) == (10, 10, 1)
    assert run(capsys, "count", "P3", "K3")[1]["result"]["emb"] == 0
    r = run(capsys, "count", "K2", "K4")[1]["result"]
    assert (r["emb"], r["ind"]) == (12, 6)


def test_count_bad_graph6_is_data_error(capsys):
    assert main(["count", "g6:D h", "C5"]) == 65


def test_check_exit_codes_and_replay(tmp_path, capsys):
    code, doc = run(capsys, "check", "C5", "--q0", "0.3", "--delta0", "0.1")
    assert code == 0
    report = tmp_path / "k5.json"
    code = main(["check", "K5", "--q0", "0.3", "--delta0", "0.1", "--out", str(report)])
    assert code == 1
    stored = json.loads(report.read_text())
    assert stored["result"]["typicality"]["conditions"]["i"]["verdict"] == "Fail"
    code, doc = run(capsys, "check", "K5", "--replay", str(report))
    assert code == 0 and doc["result"]["all_revalidate"]


def test_check_skipped_exit_code(capsys):
    code, _ = run(capsys, "check", "C13", "--q0", "0.1", "--delta0", "0.1")
    assert code == 2


def test_blowup_count(capsys):
    code, doc = run(capsys, "blowup", "--base", "C5", "--n", "25", "--H", "C5", "--count")
    assert code == 0
    assert json.dumps(doc["result"]).count("31300") >= 1


def test_optimize(capsys):
    code, doc = run(capsys, "optimize", "--base", "C5", "--n", "5")
    r = doc["result"]
    assert code == 0 and r["max_T"] == 10 and "all_balanced" in r


def test_ledger_and_preconditions(capsys):
    assert run(capsys, "ledger", "--q", "1e-20", "--k", "10^200")[0] == 0
    assert run(capsys, "ledger", "--q", "0.1", "--k", "100")[0] == 1
    assert run(capsys, "preconditions", "--ktilde", "10^200", "--p", "0.5")[0] == 0
    code, doc = run(capsys, "preconditions", "--ktilde", "1000000", "--p", "0.5")
    assert code == 1 and not doc["result"]["all_hold"]


def test_sweep_csv(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _ = run(capsys, "sweep", "--ktilde", "7", "--p", "0.3,0.5", "--samples", "4", "--csv", str(out))
    lines = out.read_text().splitlines()
    assert code == 0 and len(lines) == 3 and "pass_ii" in lines[0]


def test_manifest_and_replay(tmp_path, capsys):
    report = tmp_path / "r.json"
    assert main(["count", "P4", "C5", "--seed", "3", "--out", str(report)]) == 0
    doc = json.loads(report.read_text())
    man = doc["manifest"]
    assert doc["schema_version"] == 1
    assert {"command", "argv", "params", "seed", "version", "workers", "started", "finished"} <= set(man)
    code, rep = run(capsys, "replay", str(report))
    assert code == 0 and rep["result"]["reproduced"]


def test_verify_suite_subset(capsys):
    code, doc = run(capsys, "verify-suite", "--quick", "--only", "oracle-equivalence,epsilon-ledger")
    assert code == 0 and doc["result"]["all_pass"]


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "inducilab.cli", "count", "C5", "C5", "--no-manifest"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["emb"] == 10
