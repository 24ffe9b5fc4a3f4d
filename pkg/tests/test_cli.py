import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from shiftkit import __version__
from shiftkit.cli import list_builtins, main, run
from shiftkit.scenario import load_scenario
from shiftkit.shifts import shift_from_config

ROOT = Path(__file__).resolve().parent.parent


def write(tmp_path, obj, name="s.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj, indent=2))
    return p


def quiet_run(path, out, **kw):
    return run(str(path), str(out), stream=io.StringIO(), **kw)


def test_empty_scenario(tmp_path):
    out = tmp_path / "out"
    assert quiet_run(ROOT / "scenarios" / "empty.json", out) == 0
    assert sorted(p.name for p in out.iterdir()) == ["manifest.json"]
    man = json.loads((out / "manifest.json").read_text())
    assert man["experiments"] == [] and man["pass"] is True and man["version"] == __version__


def test_golden_approachability(tmp_path):
    out = tmp_path / "out"
    assert quiet_run(ROOT / "scenarios" / "c05_beta_golden.json", out) == 0
    rows = list(csv.DictReader(open(out / "approach.csv")))
    assert [int(r["n"]) for r in rows] == list(range(1, 15))
    assert all(int(r["max_observed_distance"]) == 1 for r in rows)
    man = json.loads((out / "manifest.json").read_text())
    names = {o["file"] for e in man["experiments"] for o in e["outputs"]}
    assert names == {"approach.csv", "approach.json"}
    assert not [p for p in out.iterdir() if p.name.endswith(".tmp")]


def test_assertion_failure_exit_code(tmp_path):
    sc = {"name": "fail", "shift": {"kind": "beta", "preset": "golden"},
          "decomposition": "builtin",
          "experiments": [{"name": "a", "type": "approachability",
                           "g": {"kind": "constant", "value": 0}, "n_max": 4,
                           "construction": "beta"}]}
    assert quiet_run(write(tmp_path, sc), tmp_path / "o") == 1


def test_schema_error_location(tmp_path, capsys):
    text = '{\n  "name": "x",\n  "experiments": [\n    {"name": "a", "type": "bogus"}\n  ]\n}\n'
    assert quiet_run(write(tmp_path, text), tmp_path / "o") == 2
    err = capsys.readouterr().err
    assert "line 4" in err and "bogus" in err


def test_json_syntax_error_location(tmp_path, capsys):
    assert quiet_run(write(tmp_path, '{\n  "name": "x",\n  "experiments": [\n'), tmp_path / "o") == 2
    assert "line 4, column 1" in capsys.readouterr().err


def test_duplicate_names_rejected(tmp_path):
    sc = {"name": "d", "experiments": [{"name": "a", "type": "stirling", "ns": [100]},
                                        {"name": "a", "type": "stirling", "ns": [100]}]}
    assert quiet_run(write(tmp_path, sc), tmp_path / "o") == 2


def test_budget_override(tmp_path):
    p = ROOT / "scenarios" / "empty.json"
    assert quiet_run(p, tmp_path / "o", overrides=["nope=3"]) == 2
    assert quiet_run(p, tmp_path / "o", overrides=["max_words=x"]) == 2
    assert quiet_run(p, tmp_path / "o", overrides=["max_words=10"]) == 0
    man = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert man["budgets"]["max_words"] == 10


def test_budget_exceeded_is_recorded(tmp_path):
    p = ROOT / "scenarios" / "c04_multiplicity_sgap.json"
    assert quiet_run(p, tmp_path / "o", overrides=["max_tuples=5"]) == 1
    man = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert [e["status"] for e in man["experiments"]] == ["budget-exceeded"] * 2
    assert man["pass"] is False


def test_same_seed_same_bytes(tmp_path):
    p = ROOT / "scenarios" / "c01_sanov.json"
    assert quiet_run(p, tmp_path / "a") == quiet_run(p, tmp_path / "b", threads=3)
    for f in sorted((tmp_path / "a").iterdir()):
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes(), f.name


def test_list_builtins_catalog():
    cat = list_builtins()
    assert set(cat["shifts"]) == {"beta", "sgap", "full", "sft", "coded", "factor"}
    for kind, cfg in cat["shifts"].items():
        lang = shift_from_config(cfg)
        assert lang.count(4) > 0
        # round trip through the scenario schema
        sc = load_scenario(json.dumps({"name": kind, "shift": cfg, "experiments": []}), "<cat>")
        assert sc["shift"] == cfg


def test_main_entry_points(capsys):
    assert main(["list-builtins"]) == 0
    assert json.loads(capsys.readouterr().out) == list_builtins()
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0


def test_console_script(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "shiftkit.cli", "run",
                           str(ROOT / "scenarios" / "c11_stirling.json"), "--out-dir",
                           str(tmp_path / "o")], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "pass" in proc.stdout
