"""Execute scenarios, write run records and compare runs against baselines."""

import csv
import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .. import __version__, calculus
from ..estimators import PROBE_FAMILY_VERSION
from .scenarios import FAIL, FLAG, PASS, SCENARIOS, build_model

SCHEMA_VERSION = 1
VERDICT_ORDER = {PASS: 0, FLAG: 1, FAIL: 2}


def task_seed(seed, experiment_id, index):
    """Per-task RNG seed derived from ``(seed, experiment id, task index)``."""
    digest = hashlib.sha256(f"{seed}:{experiment_id}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def _plain(x):
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, complex):
        return {"re": _plain(x.real), "im": _plain(x.imag)}
    return x


def _run_task(task, seed, budget):
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    with calculus.kernel_budget(budget):
        out = task.fn(rng)
    out["seed"] = seed
    return out, time.perf_counter() - t0


def run_spec(spec, workers=None):
    """Run every task of the spec and return the record (timing under ``timing``)."""
    sc = SCENARIOS[spec.scenario]
    t0 = time.perf_counter()
    model = build_model(spec)
    tasks = sc.build(spec, model)
    workers = workers or spec.budget["max_workers"]
    budget = spec.budget["max_kernel_entries"]
    seeds = [task_seed(spec.seed, spec.id, i) for i in range(len(tasks))]
    if workers <= 1:
        outs = [_run_task(t, s, budget) for t, s in zip(tasks, seeds)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_task, t, s, budget) for t, s in zip(tasks, seeds)]
            outs = [f.result() for f in futures]
    results = [o[0] for o in outs]
    summary = {v: sum(r["verdict"] == v for r in results) for v in (PASS, FLAG, FAIL)}
    verdict = max((r["verdict"] for r in results), key=VERDICT_ORDER.get, default=PASS)
    record = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "brlab", "version": __version__,
                 "probe_family_version": PROBE_FAMILY_VERSION},
        "experiment": spec.id,
        "spec": spec.to_dict(),
        "seed": spec.seed,
        "results": results,
        "summary": summary,
        "verdict": verdict,
        "timing": {"wall_seconds": time.perf_counter() - t0, "workers": workers,
                   "tasks": {r["task"]: o[1] for r, o in zip(results, outs)}},
    }
    return _plain(record)


def strip_timing(record):
    return {k: v for k, v in record.items() if k != "timing"}


def record_json(record):
    return json.dumps(record, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _flatten(prefix, value, out):
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else str(k), value[k], out)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, value))


def write_record(record, out_dir):
    """Write ``<id>.json`` and the long-format ``<id>.csv`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rid = record["experiment"]
    (out / f"{rid}.json").write_text(record_json(record), encoding="utf-8")
    with open(out / f"{rid}.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["experiment", "scenario", "task", "verdict", "key", "value"])
        for r in record["results"]:
            rows = []
            _flatten("", {k: v for k, v in r.items() if k not in ("task", "verdict")}, rows)
            for key, value in rows:
                w.writerow([rid, record["spec"]["scenario"], r["task"], r["verdict"], key,
                            value])
    return out / f"{rid}.json"


def load_records(run_dir):
    """All run records in a directory, keyed by experiment id."""
    d = Path(run_dir)
    if not d.is_dir():
        raise FileNotFoundError(f"{run_dir} is not a directory")
    records = {}
    for path in sorted(d.glob("*.json")):
        data = json.loads(path.read_text(encoding="utf-8"))
        if isinstance(data, dict) and "schema_version" in data and "results" in data:
            records[data["experiment"]] = data
    if not records:
        raise FileNotFoundError(f"no run records in {run_dir}")
    return records


def _num(x):
    return float(x) if isinstance(x, (int, float)) and not isinstance(x, bool) else None


def diff_records(run, base):
    """Regression entries between two records of the same experiment.

    A fitted slope regresses when it moves by more than 3 standard errors
    (the larger of the two runs' errors); a verdict regresses when it gets
    worse.
    """
    out = []
    base_tasks = {r["task"]: r for r in base["results"]}
    for r in run["results"]:
        b = base_tasks.get(r["task"])
        if b is None:
            out.append({"task": r["task"], "kind": "new"})
            continue
        if VERDICT_ORDER[r["verdict"]] > VERDICT_ORDER[b["verdict"]]:
            out.append({"task": r["task"], "kind": "verdict", "run": r["verdict"],
                        "baseline": b["verdict"]})
        if "slope" in r and "slope" in b:
            e1, e0 = _num(r["slope"]["exponent"]), _num(b["slope"]["exponent"])
            s1, s0 = _num(r["slope"]["stderr"]), _num(b["slope"]["stderr"])
            if None not in (e1, e0):
                err = max(s1 or 0.0, s0 or 0.0)
                if abs(e1 - e0) > 3 * err + 1e-12:
                    out.append({"task": r["task"], "kind": "slope-drift", "run": e1,
                                "baseline": e0, "stderr": err})
    return out


def report(run_dir, baseline_dir=None):
    """Human-readable summary and the regression list."""
    runs = load_records(run_dir)
    base = load_records(baseline_dir) if baseline_dir else None
    lines, regressions = [], []
    for rid, rec in runs.items():
        lines.append(f"{rid} [{rec['spec']['scenario']}] seed={rec['seed']} -> {rec['verdict']}")
        for r in rec["results"]:
            lines.append(f"  {r['verdict']:<4} {r['task']}")
        if base is not None:
            if rid not in base:
                lines.append("  new: absent from baseline")
                continue
            diffs = diff_records(rec, base[rid])
            for d in diffs:
                if d["kind"] == "new":
                    lines.append(f"  new task: {d['task']}")
                    continue
                regressions.append({"experiment": rid, **d})
                lines.append(f"  REGRESSION {d['task']}: {d['kind']} "
                             f"{d.get('baseline')} -> {d.get('run')}")
    if base is not None:
        lines.append(f"{len(regressions)} regression(s)")
    return "\n".join(lines), regressions


def default_output_dir():
    return os.environ.get("BRLAB_OUTPUT_DIR", "brlab-runs")
