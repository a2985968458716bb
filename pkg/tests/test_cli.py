import os
import subprocess
import sys

import pytest
import yaml

from phylotoric.cli import EXIT_BUDGET, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, ENV_BUDGET, main, parse_config
from phylotoric.database import InvariantRecord, conventions
from phylotoric.models import get_model


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_list(capsys):
    code, out, _ = run(capsys, "list", "--max-leaves", "4")
    assert code == EXIT_OK
    rows = yaml.safe_load(out)
    assert [r["newick"] for r in rows] == ["(1,2,3);", "(1,2,3,4);", "((1,2),(3,4));"]
    assert len(yaml.safe_load(run(capsys, "list")[1])) == 6


def test_compute_jc_claw(capsys):
    code, out, _ = run(capsys, "compute", "--tree", "1", "--model", "JC")
    rec = yaml.safe_load(out)
    assert code == EXIT_OK
    assert (rec["np"], rec["nq"], rec["dim_cone"], rec["degree"], rec["degree_profile"]) == (5, 5, 4, 3, {3: 1})
    assert rec["reference_only"]["MLdeg"]["value"] == 23


def test_compute_newick_and_file(capsys, tmp_path):
    f = tmp_path / "t.nwk"
    f.write_text("((1,2),(3,4));\n")
    for spec in ("((3,4),(1,2));", str(f)):
        code, out, _ = run(capsys, "compute", "--tree", spec, "--model", "CFN")
        rec = yaml.safe_load(out)
        assert code == EXIT_OK and rec["tree_id"] == 3 and rec["degree"] == 4


def test_compute_writes_entry(capsys, tmp_path):
    code, out, _ = run(capsys, "compute", "--tree", "1", "--model", "all", "--out", str(tmp_path))
    assert code == EXIT_OK
    assert [r["model_id"] for r in yaml.safe_load(out)] == ["CFN", "JC", "K2P", "K3P"]
    assert len(list(tmp_path.iterdir())) == 32


def test_five_star_jc(capsys):
    code, out, _ = run(capsys, "compute", "--tree", "4", "--model", "JC")
    rec = yaml.safe_load(out)
    assert code == EXIT_OK and rec["np"] == 27 and rec["dim_cone"] == 6 and rec["degree"] == 115


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["compute", "--model", "JC"],
    ["compute", "--tree", "1", "--model", "HKY"],
    ["compute", "--tree", "99", "--model", "JC"],
    ["compute", "--tree", "(1,2", "--model", "JC"],
    ["compute", "--tree", "1", "--model", "JC", "--jobs", "2"],
    ["compute", "--tree", "1", "--model", "JC", "--step-budget", "0"],
    ["compute", "--tree", "(1,3,2,4,5,6);", "--model", "JC", "--out", "x"],
    ["list", "--max-leaves", "9"],
    ["build-db", "--max-leaves", "3"],
    ["verify"],
    ["verify", "--db", "/nonexistent/db"],
])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_USAGE and out == "" and "error" in err


def test_budget_flag_and_environment(capsys, monkeypatch):
    assert run(capsys, "compute", "--tree", "2", "--model", "K2P", "--step-budget", "5")[0] == EXIT_BUDGET
    monkeypatch.setenv(ENV_BUDGET, "5")
    assert parse_config(["compute", "--tree", "2", "--model", "K2P"]).step_budget == 5
    assert parse_config(["compute", "--tree", "2", "--model", "K2P", "--step-budget", "7"]).step_budget == 7
    code, out, _ = run(capsys, "compute", "--tree", "2", "--model", "K2P")
    assert code == EXIT_BUDGET and out == ""
    monkeypatch.setenv(ENV_BUDGET, "lots")
    assert run(capsys, "compute", "--tree", "1", "--model", "JC")[0] == EXIT_USAGE


def test_build_and_verify(capsys, tmp_path):
    db = tmp_path / "db"
    code, out, _ = run(capsys, "build-db", "--max-leaves", "3", "--models", "JC,CFN", "--out", str(db), "--jobs", "2")
    assert code == EXIT_OK and yaml.safe_load(out)["ok"] == 2
    code, out, _ = run(capsys, "verify", "--db", str(db))
    report = yaml.safe_load(out)
    assert code == EXIT_OK and report["summary"].get("mismatch", 0) == 0
    rec = InvariantRecord(4, "JC", "(1,2,3,4,5);", "Z/2 x Z/2", 27, 27, 6, 5, 114, {4: 100, 5: 75},
                          conventions=conventions(get_model("JC")))
    (db / "invariants_4-JC.yaml").write_text(rec.to_yaml())
    code, out, _ = run(capsys, "verify", "--db", str(db))
    assert code == EXIT_MISMATCH and yaml.safe_load(out)["summary"]["mismatch"] == 1
    code, _, _ = run(capsys, "build-db", "--max-leaves", "3", "--models", "K3P", "--out", str(tmp_path / "b"),
                     "--step-budget", "3")
    assert code == EXIT_BUDGET


def test_console_script_stdout_is_yaml_only(tmp_path):
    env = dict(os.environ)
    env.pop(ENV_BUDGET, None)
    proc = subprocess.run([sys.executable, "-m", "phylotoric.cli", "compute", "--tree", "1", "--model", "CFN",
                           "--out", str(tmp_path)], capture_output=True, text=True, env=env, check=False)
    assert proc.returncode == 0
    assert yaml.safe_load(proc.stdout)["degree"] == 1
    assert "wrote" in proc.stderr and "wrote" not in proc.stdout
