import csv
import json

import numpy as np
import pytest
import yaml

from brlab.bench import cli, runner
from brlab.bench.config import ConfigParseError, load_spec, parse_spec
from brlab.bench.scenarios import SCENARIOS


def default(name, **over):
    cfg = SCENARIOS[name].default_config()
    cfg.update(over)
    return cfg


def write_config(tmp_path, cfg, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(cfg), encoding="utf-8")
    return path


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_default_configs_parse(name):
    spec = parse_spec(SCENARIOS[name].default_config())
    assert spec.scenario == name and spec.seed == 20240601


@pytest.mark.parametrize("mutate, location", [
    (lambda c: c.update(extra=1), "extra"),
    (lambda c: c.pop("seed"), "seed"),
    (lambda c: c.update(seed=-1), "seed"),
    (lambda c: c.update(seed=2 ** 64), "seed"),
    (lambda c: c.update(scenario="nope"), "scenario"),
    (lambda c: c["budget"].update(max_workers=0), "budget.max_workers"),
    (lambda c: c["budget"].update(bogus=1), "budget.bogus"),
    (lambda c: c["parameters"].update(p=0.5), "parameters.p"),
    (lambda c: c["parameters"].update(unknown=1), "parameters.unknown"),
    (lambda c: c.update(model={}), "model.kind"),
])
def test_config_errors_name_location(mutate, location):
    cfg = default("restriction-sweep")
    cfg["budget"] = dict(cfg.get("budget") or {})
    cfg["parameters"] = dict(cfg.get("parameters") or {})
    mutate(cfg)
    with pytest.raises(ConfigParseError) as exc:
        parse_spec(cfg)
    assert exc.value.location == location


def test_exponent_message():
    cfg = default("restriction-sweep")
    cfg["parameters"] = {"p": 0.5}
    with pytest.raises(ConfigParseError, match="exponent must be >= 1"):
        parse_spec(cfg)


def test_inf_exponent_accepted():
    cfg = default("tdelta-sweep")
    cfg["parameters"] = {"q": "inf"}
    assert np.isinf(parse_spec(cfg).parameters["q"])


def test_invalid_yaml(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("id: [unclosed\n", encoding="utf-8")
    with pytest.raises(ConfigParseError, match="invalid YAML"):
        load_spec(path)


def test_task_seed_stable():
    assert runner.task_seed(1, "a", 0) == runner.task_seed(1, "a", 0)
    assert len({runner.task_seed(1, "a", i) for i in range(50)}) == 50
    assert runner.task_seed(1, "a", 0) != runner.task_seed(2, "a", 0)


@pytest.fixture(scope="module")
def tdelta_record():
    cfg = default("tdelta-sweep")
    cfg["parameters"] = {"n_fields": 2}
    return runner.run_spec(parse_spec(cfg))


def test_record_shape(tdelta_record):
    rec = tdelta_record
    assert rec["verdict"] == "PASS"
    assert rec["tool"]["probe_family_version"] == "1"
    assert set(rec["timing"]) == {"wall_seconds", "workers", "tasks"}
    assert [r["task"] for r in rec["results"]] == ["tdelta-scaling", "tdelta-l2-law"]
    assert all("seed" in r for r in rec["results"])
    json.loads(runner.record_json(rec))


def test_write_record_json_and_csv(tmp_path, tdelta_record):
    path = runner.write_record(tdelta_record, tmp_path)
    assert json.loads(path.read_text()) == tdelta_record
    with open(tmp_path / f"{tdelta_record['experiment']}.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["experiment", "scenario", "task", "verdict", "key", "value"]
    assert any(r[4] == "slope.exponent" for r in rows[1:])


def test_report_detects_regressions(tmp_path, tdelta_record):
    base = tmp_path / "base"
    run = tmp_path / "run"
    runner.write_record(tdelta_record, base)
    worse = json.loads(json.dumps(tdelta_record))
    worse["results"][0]["verdict"] = "FAIL"
    worse["results"][0]["slope"]["exponent"] += 1.0
    runner.write_record(worse, run)
    text, regressions = runner.report(run, base)
    assert {r["kind"] for r in regressions} == {"verdict", "slope-drift"}
    _, none = runner.report(base, base)
    assert none == []


def test_nonfinite_values_serialised():
    assert runner._plain({"a": np.float64("inf"), "b": np.array([np.nan, 1.0])}) == \
        {"a": "inf", "b": ["nan", 1.0]}


@pytest.mark.slow
def test_worker_count_does_not_change_record():
    spec = parse_spec(default("weighted-square"))
    a = runner.strip_timing(runner.run_spec(spec, workers=1))
    b = runner.strip_timing(runner.run_spec(spec, workers=4))
    assert runner.record_json(a) == runner.record_json(b)


def test_cli_run_and_report(tmp_path, capsys):
    cfg = default("fs-check")
    path = write_config(tmp_path, cfg)
    out = tmp_path / "out"
    assert cli.main(["run", str(path), "-o", str(out)]) == cli.EXIT_OK
    assert (out / f"{cfg['id']}.json").exists()
    assert cli.main(["report", str(out), "--baseline", str(out)]) == cli.EXIT_OK
    assert "0 regression(s)" in capsys.readouterr().out


def test_cli_output_dir_from_environment(tmp_path, monkeypatch):
    cfg = default("restriction-sweep")
    path = write_config(tmp_path, cfg)
    monkeypatch.setenv("BRLAB_OUTPUT_DIR", str(tmp_path / "env-out"))
    assert cli.main(["run", str(path)]) == cli.EXIT_OK
    assert (tmp_path / "env-out" / f"{cfg['id']}.json").exists()


def test_cli_config_error_exit(tmp_path, capsys):
    cfg = default("restriction-sweep")
    cfg["parameters"] = {"p": 0.5}
    assert cli.main(["run", str(write_config(tmp_path, cfg))]) == cli.EXIT_CONFIG
    assert "parameters.p" in capsys.readouterr().err
    assert cli.main(["run", str(tmp_path / "missing.yaml")]) == cli.EXIT_CONFIG


def test_cli_resource_exit(tmp_path):
    cfg = default("ev-g-ge-check")
    cfg["budget"] = {"max_kernel_entries": 10000}
    path = write_config(tmp_path, cfg)
    assert cli.main(["run", str(path), "-o", str(tmp_path)]) == cli.EXIT_RESOURCE


def test_cli_fail_exit(tmp_path):
    cfg = default("tdelta-sweep")
    cfg["parameters"] = {"n_fields": 1, "slope_tolerance": 0.0}
    path = write_config(tmp_path, cfg)
    assert cli.main(["run", str(path), "-o", str(tmp_path)]) == cli.EXIT_FAIL


def test_cli_report_missing_dir(tmp_path):
    assert cli.main(["report", str(tmp_path / "nowhere")]) == cli.EXIT_CONFIG


def test_cli_list_and_default(capsys):
    assert cli.main(["list-scenarios"]) == cli.EXIT_OK
    listed = capsys.readouterr().out
    assert all(name in listed for name in SCENARIOS)
    assert cli.main(["print-default-config", "sc-sweep"]) == cli.EXIT_OK
    assert parse_spec(yaml.safe_load(capsys.readouterr().out)).scenario == "sc-sweep"
    assert cli.main(["print-default-config", "nope"]) == cli.EXIT_CONFIG
