import csv
import json
import subprocess
import sys

import pytest

from conftest import DATA
from wickfock.cli import main
from wickfock.errors import ConfigurationError
from wickfock.scenario import CSV_COLUMNS, Scenario, bundled_scenarios, run_scenario


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_list_scenarios(capsys):
    assert main(["--list-scenarios"]) == 0
    names = capsys.readouterr().out.split()
    assert names == sorted(bundled_scenarios())
    assert "oscillator-wick-square" in names


def test_bundled_oscillator_passes(tmp_path):
    assert main(["oscillator-wick-square", "--out", str(tmp_path)]) == 0
    rows = read_rows(tmp_path / "report.csv")
    assert rows and list(rows[0]) == list(CSV_COLUMNS)
    assert all(r["pass"] == "true" for r in rows)
    certs = {r["certificate"].split("/")[0] for r in rows}
    assert {"nelson", "wuest", "konrady", "commutator_identities", "t1_scan", "truncation_stability",
            "cutoff", "inverse_inequality", "graph_limit", "squares_partition"} <= certs
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["passed"] and doc["scenarios"][0]["rows"][0]["description"]
    cut = read_rows(tmp_path / "oscillator-wick-square_cutoffs.csv")
    assert list(cut[0])[:3] == ["cutoff", "c_n", "min_eig_increment"]


def test_adversarial_scenario_exits_one(tmp_path, capsys):
    assert main([str(DATA / "adversarial-wuest.ini"), "--out", str(tmp_path)]) == 1
    rows = read_rows(tmp_path / "report.csv")
    failing = [r for r in rows if r["pass"] == "false"]
    assert failing and failing[0]["certificate"].startswith("wuest/")


def test_non_positive_model_exits_two_without_files(tmp_path, capsys):
    out = tmp_path / "out"
    assert main([str(DATA / "not-positive.ini"), "--out", str(out)]) == 2
    err = capsys.readouterr().err
    assert "eigenvalue -5.000000e-01" in err
    assert not out.exists()


def test_config_errors_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[scenario]\nname = x\n")
    assert main([str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "missing the [model] section" in capsys.readouterr().err
    assert main(["no-such-scenario", "--out", str(tmp_path / "o")]) == 2
    bad.write_text((DATA / "adversarial-wuest.ini").read_text().replace("select = nelson wuest", "select = bogus"))
    assert main([str(bad), "--out", str(tmp_path / "o")]) == 2
    big = (DATA / "adversarial-wuest.ini").read_text().replace("points = 8", "points = 8\n").replace(
        "[truncation]\n", "[truncation]\nmemory_cap = 3\n")
    bad.write_text(big)
    assert main([str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "MemoryGuardError" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_file_smearing_scenario(tmp_path):
    assert main([str(DATA / "file-smearing.ini"), "--out", str(tmp_path)]) == 0


def test_strict_turns_warnings_into_failures(tmp_path):
    text = (DATA / "file-smearing.ini").read_text().replace("points = 6", "points = 6\nperiodic = false")
    cfg = tmp_path / "open.ini"
    cfg.write_text(text.replace("file = file-smearing.txt", f"file = {DATA / 'file-smearing.txt'}"))
    res = run_scenario(Scenario.load(str(cfg)))
    assert res.warnings and res.passed
    assert main([str(cfg), "--out", str(tmp_path / "a")]) == 0
    assert main([str(cfg), "--out", str(tmp_path / "b"), "--strict"]) == 1


def test_seed_and_env_overrides(tmp_path, monkeypatch):
    monkeypatch.setenv("WICKFOCK_OUT", str(tmp_path / "env"))
    monkeypatch.setenv("WICKFOCK_WORKERS", "2")
    assert main(["oscillator-wick-square", "--seed", "99"]) == 0
    assert (tmp_path / "env" / "report.csv").exists()
    doc = json.loads((tmp_path / "env" / "report.json").read_text())
    assert doc["scenarios"][0]["seed"] == 99


def test_scenario_validation():
    with pytest.raises(ConfigurationError):
        Scenario.from_text("not an ini")
    with pytest.raises(ConfigurationError, match="seed"):
        Scenario.from_text("[scenario]\nname=a\nseed=x\n[model]\n[smearing]\n[truncation]\n")


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "wickfock", "--list-scenarios"], capture_output=True, text=True)
    assert proc.returncode == 0 and "chain-wick-square" in proc.stdout
