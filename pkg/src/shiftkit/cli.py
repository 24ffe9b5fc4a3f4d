"""Command line front end: ``shiftkit run`` and ``shiftkit list-builtins``."""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .errors import ShiftkitError
from .scenario import (DEFAULT_BUDGETS, EXPERIMENT_TYPES, Context, ScenarioError, jsonable,
                       load_scenario, run_experiment)
from .shifts import shift_from_config
from .shifts.config import KINDS

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_bytes(obj) -> bytes:
    return (json.dumps(jsonable(obj), indent=2, ensure_ascii=False, allow_nan=False)
            + "\n").encode()


def _csv_bytes(rows: list[dict]) -> bytes:
    header: list[str] = []
    for r in rows:
        for k in r:
            if k not in header:
                header.append(k)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: jsonable(v) for k, v in r.items()})
    return buf.getvalue().encode()


def _parse_overrides(items: list[str]) -> dict[str, int]:
    out = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep or key not in DEFAULT_BUDGETS:
            raise ScenarioError(f"bad budget override {item!r}; keys: {', '.join(DEFAULT_BUDGETS)}")
        try:
            out[key] = int(val)
        except ValueError:
            raise ScenarioError(f"budget {key} must be an integer, got {val!r}") from None
        if out[key] < 1:
            raise ScenarioError(f"budget {key} must be positive")
    return out


def run(path: str, out_dir: str | None = None, threads: int = 1, overrides=(),
        seed: int | None = None, stream=sys.stdout) -> int:
    """Run a scenario file; returns the exit status."""
    src = Path(path)
    try:
        raw = src.read_bytes()
        scenario = load_scenario(raw.decode("utf-8"), str(src))
        budgets = dict(DEFAULT_BUDGETS)
        budgets.update(scenario.get("budgets", {}))
        budgets.update(_parse_overrides(list(overrides)))
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_CONFIG
    run_seed = scenario.get("seed", 0) if seed is None else seed
    out = Path(out_dir) if out_dir else Path("out") / scenario["name"]
    ctx = Context(scenario, budgets, run_seed, threads)
    entries = []
    overall = True
    for exp in scenario["experiments"]:
        try:
            res = run_experiment(ctx, exp)
        except ShiftkitError as exc:
            print(f"error: {exp['name']}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        files = []
        if res.rows is not None:
            data = _csv_bytes(res.rows)
            _atomic_write(out / f"{exp['name']}.csv", data)
            files.append({"file": f"{exp['name']}.csv", "sha256": hashlib.sha256(data).hexdigest()})
        summary = {"experiment": exp["name"], "type": exp["type"], **res.summary}
        data = _json_bytes(summary)
        _atomic_write(out / f"{exp['name']}.json", data)
        files.append({"file": f"{exp['name']}.json", "sha256": hashlib.sha256(data).hexdigest()})
        graded = exp.get("assert", True) and res.passed is not None
        if graded and not res.passed:
            overall = False
        status = res.summary.get("status", "ok")
        entries.append({"name": exp["name"], "type": exp["type"], "status": status,
                        "assertion": graded, "pass": res.passed, "outputs": files})
        verdict = {True: "pass", False: "FAIL", None: "done"}[res.passed]
        print(f"{exp['name']}: {verdict}", file=stream)
    manifest = {"tool": "shiftkit", "version": __version__, "scenario": scenario["name"],
                "scenario_sha256": hashlib.sha256(raw).hexdigest(), "seed": run_seed,
                "budgets": budgets, "experiments": entries, "pass": overall}
    _atomic_write(out / "manifest.json", _json_bytes(manifest))
    return EXIT_OK if overall else EXIT_FAIL


BUILTIN_DEFAULTS = {
    "beta": {"kind": "beta", "preset": "golden"},
    "coded": {"kind": "coded", "alphabet": ["0", "1"], "generators": ["1", "00"]},
    "factor": {"kind": "factor", "source": {"kind": "full", "size": 2},
               "code": {"radius": 1, "target": ["0", "1"],
                        "rule": {a + b + c: str((int(a) + int(c)) % 2)
                                 for a in "01" for b in "01" for c in "01"}}},
    "full": {"kind": "full", "size": 2},
    "sft": {"kind": "sft", "alphabet": ["0", "1"], "forbidden": ["11"]},
    "sgap": {"kind": "sgap", "S": {"kind": "evens"}},
}


def list_builtins() -> dict:
    """Catalog of shift kinds (with default configurations), decompositions and measures."""
    assert tuple(sorted(BUILTIN_DEFAULTS)) == KINDS
    return {
        "shifts": {k: BUILTIN_DEFAULTS[k] for k in KINDS},
        "decompositions": {"builtin": ["beta", "coded", "full", "sgap"],
                           "custom": ["forbidden", "required", "starts_with", "ends_with",
                                      "only_empty"]},
        "measures": {"bernoulli": {"kind": "bernoulli", "weights": ["1/2", "1/2"]},
                     "markov": {"kind": "markov", "matrix": [["1/2", "1/2"], ["1/2", "1/2"]]},
                     "graph-perron": {"kind": "graph-perron", "n_trunc": 64}},
        "experiments": list(EXPERIMENT_TYPES),
    }


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="shiftkit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"shiftkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a scenario file")
    p_run.add_argument("file")
    p_run.add_argument("--out-dir", default=None)
    p_run.add_argument("--threads", type=int, default=1)
    p_run.add_argument("--budget-override", action="append", default=[], metavar="K=V")
    p_run.add_argument("--seed", type=int, default=None)
    sub.add_parser("list-builtins", help="print the catalog of built-ins as JSON")
    args = parser.parse_args(argv)
    if args.command == "run":
        return run(args.file, args.out_dir, args.threads, args.budget_override, args.seed)
    cat = list_builtins()
    for cfg in cat["shifts"].values():
        shift_from_config(cfg)
    sys.stdout.write(json.dumps(cat, indent=2) + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
