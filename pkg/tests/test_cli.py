import json
import subprocess
import sys

import pytest

from trigbethe import cli


def _run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_suite_default_config_passes(capsys):
    code, out, _ = _run(["suite"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["pass"]
    assert doc["schema"] == "trigbethe.report/1"
    assert doc["config"]["N"] == 2 and doc["config"]["L"] == 3
    assert {c["group"] for c in doc["checks"]} == set(cli.ck.SUITE)


def test_suite_is_deterministic_across_jobs(capsys):
    _, a, _ = _run(["suite", "--seed", "5"], capsys)
    _, b, _ = _run(["suite", "--seed", "5", "--jobs", "2"], capsys)
    _, c, _ = _run(["suite", "--seed", "6"], capsys)
    assert a == b and a != c


@pytest.mark.parametrize(
    "bad",
    ['{"N": "two"}', '{"N": 3, "sets": [[1]]}', '{"q": 1}', '{"bogus": 1}', "not json", '{"xi": ["1/2"]}'],
)
def test_malformed_config_exits_2_without_output(tmp_path, capsys, bad):
    cfg = tmp_path / "c.json"
    cfg.write_text(bad)
    out_file = tmp_path / "report.json"
    code, out, err = _run(["suite", "--config", str(cfg), "--out", str(out_file)], capsys)
    assert code == 2 and out == "" and "error" in err
    assert not out_file.exists()


def test_perturbed_action_fails_with_partition(capsys):
    code, out, err = _run(["check-action", "--perturb"], capsys)
    doc = json.loads(out)
    assert code == 1 and not doc["pass"]
    assert "FAIL single-action" in err and '"partition"' in err
    failed = [c for c in doc["checks"] if not c["pass"]]
    assert all("perturbed_term" in c["witness"] for c in failed)


@pytest.mark.parametrize("command", list(cli.COMMANDS))
def test_every_command_runs(capsys, command):
    if command == "suite":
        return
    code, out, _ = _run([command], capsys)
    assert code == 0, json.loads(out)["checks"]


def test_float_mode(capsys):
    code, out, _ = _run(["check-action", "--mode", "float"], capsys)
    assert code == 0 and json.loads(out)["config"]["mode"] == "float"


def test_literal_flags_report_known_defects(capsys, tmp_path):
    code, _, _ = _run(["check-hc", "--literal"], capsys)
    assert code == 1
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"N": 3, "L": 3, "max_total": 3}))
    code, out, _ = _run(["check-zero-modes", "--literal", "--config", str(cfg)], capsys)
    assert code == 1
    code, _, _ = _run(["check-zero-modes", "--config", str(cfg)], capsys)
    assert code == 0


def test_given_sets_and_grid(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({
        "N": 3, "L": 2,
        "u": [["1/2"], ["3/7"]], "t": [["2/3"], ["-5/4"]],
        "grid": [{"u": [["1/2", "3"], ["3/7"]], "t": [["2/3", "-2"], ["-5/4"]]}],
    }))
    code, out, _ = _run(["scalar-product", "--config", str(cfg)], capsys)
    (chk,) = json.loads(out)["checks"]
    assert code == 0 and chk["direct"] == chk["partition_sum"]
    code, out, _ = _run(["check-hc", "--config", str(cfg)], capsys)
    (chk,) = json.loads(out)["checks"]
    assert code == 0 and "/" in chk["Z"]


def test_build_bv_exports_state(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"N": 3, "L": 2, "sets": [["1/2"], ["3/7"]]}))
    out_file = tmp_path / "bv.json"
    code, out, _ = _run(["build-bv", "--config", str(cfg), "--out", str(out_file)], capsys)
    assert code == 0 and out == ""
    doc = json.loads(out_file.read_text())
    state = doc["checks"][0]["state"]
    assert state["schema"] == "trigbethe.state/1" and state["entries"]


def test_solve_bethe_flags(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"N": 2, "L": 4, "r": [2]}))
    code, out, _ = _run(["solve-bethe", "--config", str(cfg), "--tol", "1e-11", "--restarts", "40"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["checks"][0]["solver"]["schema"] == "trigbethe.roots-report/1"


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "trigbethe.cli", "check-yang-baxter", "--seed", "3"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["pass"]
