"""Experiment configuration files.

A config is a single YAML document::

    id: torus-identities          # unique per run
    scenario: verify-identities   # see ``brlab list-scenarios``
    seed: 20240601                # 64-bit integer, echoed in every record
    model:                        # passed to brlab.models.model_from_config
      kind: torus-1d
      modes: 32
      grid: 128
    parameters:                   # scenario specific, merged over the defaults
      deltas: [0.25, 0.125, 0.0625]
    budget:
      max_kernel_entries: 16777216
      max_workers: 1

Only plain mappings, lists, numbers and strings are accepted; unknown keys
are errors.  ``inf`` may be written for infinite exponents.
"""

from dataclasses import dataclass, field

import yaml

from ..errors import ConfigError

TOP_KEYS = {"id", "scenario", "seed", "model", "parameters", "budget"}
BUDGET_KEYS = {"max_kernel_entries", "max_workers"}
DEFAULT_BUDGET = {"max_kernel_entries": 2 ** 24, "max_workers": 1}


class ConfigParseError(ConfigError):
    """A config problem, with the dotted location of the offending field."""

    def __init__(self, location, message):
        super().__init__(f"{location}: {message}")
        self.location = location


@dataclass
class ExperimentSpec:
    id: str
    scenario: str
    seed: int
    model: dict
    parameters: dict = field(default_factory=dict)
    budget: dict = field(default_factory=lambda: dict(DEFAULT_BUDGET))

    def to_dict(self):
        return {"id": self.id, "scenario": self.scenario, "seed": self.seed,
                "model": self.model, "parameters": self.parameters, "budget": self.budget}


def _as_int(value, location, lo=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigParseError(location, f"expected an integer, got {value!r}")
    if lo is not None and value < lo:
        raise ConfigParseError(location, f"must be >= {lo}, got {value}")
    return value


def parse_spec(data, source="<config>"):
    """Validate a loaded mapping into an :class:`ExperimentSpec`.

    Scenario parameters are checked against the scenario's schema.
    """
    from .scenarios import SCENARIOS

    if not isinstance(data, dict):
        raise ConfigParseError(source, "the document must be a mapping")
    unknown = set(data) - TOP_KEYS
    if unknown:
        raise ConfigParseError(sorted(unknown)[0], "unknown key")
    for key in ("id", "scenario", "seed", "model"):
        if key not in data:
            raise ConfigParseError(key, "missing")
    if not isinstance(data["id"], str) or not data["id"]:
        raise ConfigParseError("id", "must be a non-empty string")
    scenario = data["scenario"]
    if scenario not in SCENARIOS:
        raise ConfigParseError("scenario", f"unknown scenario {scenario!r}")
    seed = _as_int(data["seed"], "seed", 0)
    if seed >= 2 ** 64:
        raise ConfigParseError("seed", "must fit in 64 bits")
    model = data["model"]
    if not isinstance(model, dict) or "kind" not in model:
        raise ConfigParseError("model.kind", "missing")
    budget = dict(DEFAULT_BUDGET)
    raw_budget = data.get("budget") or {}
    if not isinstance(raw_budget, dict):
        raise ConfigParseError("budget", "must be a mapping")
    for key, value in raw_budget.items():
        if key not in BUDGET_KEYS:
            raise ConfigParseError(f"budget.{key}", "unknown key")
        budget[key] = _as_int(value, f"budget.{key}", 1)
    params = data.get("parameters") or {}
    if not isinstance(params, dict):
        raise ConfigParseError("parameters", "must be a mapping")
    params = SCENARIOS[scenario].validate(params)
    return ExperimentSpec(data["id"], scenario, seed, dict(model), params, budget)


def load_spec(path):
    """Read and validate a YAML config file."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigParseError(str(path), f"cannot read: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{path}:{mark.line + 1}:{mark.column + 1}" if mark else str(path)
        raise ConfigParseError(where, "invalid YAML") from None
    return parse_spec(data, str(path))


def dump_spec(spec_dict):
    return yaml.safe_dump(spec_dict, sort_keys=False, default_flow_style=None)
