"""Scenario documents: lookup, dot-path overrides, conversion to ScenarioConfig."""
from __future__ import annotations

import copy
import json
import os
from importlib import resources
from pathlib import Path

from .errors import ConfigError, ParseError, ValidationError
from .load_model import CapacityVector, ModulationStep, ResourceDemand, Weights, WorkloadProfile
from .migration import PlannerConfig
from .simulator import ScenarioConfig
from .threshold import ThresholdConfig
from .topology import read_json, topology_from_dict

ENV_SCENARIO_DIR = "DLBMT_SCENARIO_DIR"
BUNDLED = ("atlanta", "arn", "germany50", "interroute")

_PLANNER_KEYS = ("efficiency_direction", "dc_mean_scope", "migration_protocol_messages",
                 "default_new_controller_capacity", "max_added_controllers", "shutdown_search_budget")
_SIM_KEYS = ("single_threshold", "balance_every_n_ticks", "enable_scale_out", "enable_shutdown",
             "shutdown_cooldown_ticks")
KNOWN_KEYS = frozenset((
    "name", "description", "nodes", "edges", "controllers", "switches", "workload", "weights",
    "thresholds", "hysteresis", "strategy", "ticks", "seed", "migration", "response_time",
    "background", "source",
) + _PLANNER_KEYS + _SIM_KEYS)


def bundled_dir() -> Path:
    return Path(str(resources.files("dlbmt") / "scenarios"))


def scenario_search_path() -> list[Path]:
    dirs = [Path(p) for p in os.environ.get(ENV_SCENARIO_DIR, "").split(os.pathsep) if p]
    return dirs + [bundled_dir()]


def resolve_scenario(name) -> Path:
    """A file path as given, else ``name`` or ``name.json`` on the search path."""
    p = Path(name)
    if p.is_file():
        return p
    for d in scenario_search_path():
        for cand in (d / p.name, d / f"{p.name}.json"):
            if cand.is_file():
                return cand
    raise ParseError(f"scenario file not found: {name}")


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(doc: dict, overrides) -> dict:
    """Apply ``dot.path=value`` assignments; values are parsed as JSON when possible."""
    doc = copy.deepcopy(doc)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        path, raw = item.split("=", 1)
        keys = path.strip().split(".")
        if not all(keys):
            raise ConfigError(f"bad override key {path!r}")
        if keys[0] not in KNOWN_KEYS:
            raise ConfigError(f"unknown scenario key {keys[0]!r} in override {item!r}")
        node = doc
        for k in keys[:-1]:
            if isinstance(node, list):
                node = node[int(k)]
                continue
            nxt = node.get(k)
            if not isinstance(nxt, (dict, list)):
                nxt = {}
                node[k] = nxt
            node = nxt
        if isinstance(node, list):
            node[int(keys[-1])] = _parse_value(raw)
        else:
            node[keys[-1]] = _parse_value(raw)
    return doc


def _capacity(obj, what) -> CapacityVector:
    if not isinstance(obj, dict):
        raise ParseError(f"{what} must be an object with cpu/mem/bw")
    try:
        return CapacityVector(float(obj["cpu"]), float(obj["mem"]), float(obj["bw"]))
    except KeyError as exc:
        raise ParseError(f"{what} is missing {exc}") from None


def _weights(obj) -> Weights:
    if obj is None:
        return Weights()
    if isinstance(obj, (list, tuple)) and len(obj) == 3:
        return Weights(*map(float, obj))
    if isinstance(obj, dict):
        return Weights(float(obj.get("a", 0)), float(obj.get("b", 0)), float(obj.get("c", 0)))
    raise ParseError(f"weights must be [a, b, c] or {{a, b, c}}, got {obj!r}")


def _workload(obj, switch_ids, seed) -> WorkloadProfile:
    obj = obj or {}
    if not isinstance(obj, dict):
        raise ParseError("'workload' must be an object")
    base = float(obj.get("base_rate", 0.0))
    rates = {s: base for s in switch_ids}
    per_switch = obj.get("rates", {})
    if not isinstance(per_switch, dict):
        raise ParseError("workload.rates must map switch id to rate")
    for s, r in per_switch.items():
        rates[str(s)] = float(r)
    uc = obj.get("unit_costs", {"cpu": 1.0, "mem": 1.0, "bw": 1.0})
    if not isinstance(uc, dict):
        raise ParseError("workload.unit_costs must be an object")
    costs = ResourceDemand(float(uc.get("cpu", 0.0)), float(uc.get("mem", 0.0)), float(uc.get("bw", 0.0)))
    steps = []
    for m in obj.get("modulation", []):
        try:
            steps.append(ModulationStep(int(m["from_tick"]), int(m["to_tick"]), float(m["multiplier"])))
        except (KeyError, TypeError, ValueError):
            raise ParseError(f"bad modulation entry {m!r}") from None
    return WorkloadProfile(tuple(switch_ids), rates, costs, tuple(steps), int(seed),
                           float(obj.get("jitter", 0.0)))


def config_from_dict(doc: dict, name: str = "") -> ScenarioConfig:
    if not isinstance(doc, dict):
        raise ParseError("scenario must be a JSON object")
    unknown = set(doc) - KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
    topo = topology_from_dict(doc, name=doc.get("name", name))
    seed = int(doc.get("seed", 0))
    try:
        planner_doc = dict(doc.get("migration", {}))
        planner_doc.update({k: doc[k] for k in _PLANNER_KEYS if k in doc})
        cap = planner_doc.get("default_new_controller_capacity")
        planner = PlannerConfig(
            efficiency_direction=planner_doc.get("efficiency_direction", "max"),
            dc_mean_scope=planner_doc.get("dc_mean_scope", "fleet"),
            migration_protocol_messages=int(planner_doc.get("migration_protocol_messages", 6)),
            default_new_controller_capacity=None if cap is None else _capacity(cap, "default_new_controller_capacity"),
            max_added_controllers=int(planner_doc.get("max_added_controllers", 8)),
            shutdown_search_budget=int(planner_doc.get("shutdown_search_budget", 20000)),
        )
        rt = doc.get("response_time", {})
        thresholds = ThresholdConfig(tuple(doc.get("thresholds", (25, 50, 75, 100))),
                                     float(doc.get("hysteresis", 0.0)))
        extra = {k: doc[k] for k in _SIM_KEYS if k in doc}
        return ScenarioConfig(
            topology=topo,
            workload=_workload(doc.get("workload"), [s.id for s in topo.switches], seed),
            weights=_weights(doc.get("weights")),
            thresholds=thresholds,
            strategy=str(doc.get("strategy", "dlbmt")),
            ticks=int(doc.get("ticks", 100)),
            seed=seed,
            planner=planner,
            base_service_ms=float(rt.get("base_service_ms", 2.0)),
            saturation_exponent=float(rt.get("saturation_exponent", 1.0)),
            background={str(k): float(v) for k, v in doc.get("background", {}).items()},
            name=topo.name,
            **extra,
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ValidationError(str(exc)) from None


def load_document(name, overrides=()) -> tuple[dict, Path]:
    path = resolve_scenario(name)
    doc = read_json(path)
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: scenario must be a JSON object")
    doc.setdefault("name", path.stem)
    return apply_overrides(doc, overrides), path


def load_scenario(name, overrides=(), **fields) -> ScenarioConfig:
    """Resolve, parse and validate a scenario; ``fields`` override top-level keys."""
    doc, path = load_document(name, overrides)
    for k, v in fields.items():
        if v is not None:
            doc[k] = v
    return config_from_dict(doc, name=path.stem)
