"""Discrete-time control-plane simulation.

Each tick: regenerate demands, recompute loads, reclassify controllers
(counting notifications), let the strategy migrate/scale, record metrics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DLBMTError, SimulationError, ValidationError
from .fleet import Fleet
from .load_model import WorkloadProfile, Weights, demands_for_tick
from .migration import (MigrationPlan, PlannerConfig, ScaleKind, apply_plan,
                        apply_scale_action, imbalance_degree, plan_migration, resolve_no_plan,
                        try_shutdown_idle)
from .threshold import DEFAULT_THRESHOLDS, TARGET_LEVELS, LoadLevel, ThresholdConfig
from .topology import Topology, id_key

STRATEGIES = ("dlbmt", "single-threshold")


@dataclass
class ScenarioConfig:
    topology: Topology
    workload: WorkloadProfile
    weights: Weights = Weights()
    thresholds: ThresholdConfig = DEFAULT_THRESHOLDS
    strategy: str = "dlbmt"
    ticks: int = 100
    seed: int = 0
    planner: PlannerConfig = PlannerConfig()
    base_service_ms: float = 2.0
    saturation_exponent: float = 1.0
    background: dict = field(default_factory=dict)
    single_threshold: float = 75.0
    balance_every_n_ticks: int = 1
    enable_scale_out: bool = True
    enable_shutdown: bool = True
    shutdown_cooldown_ticks: int = 20
    name: str = ""

    def __post_init__(self):
        if self.ticks < 1:
            raise ValidationError("tick count must be at least 1")
        if self.strategy not in STRATEGIES:
            raise ValidationError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        if self.balance_every_n_ticks < 1:
            raise ValidationError("balance_every_n_ticks must be at least 1")
        unknown = set(self.background) - {c.id for c in self.topology.controllers}
        if unknown:
            raise ValidationError(f"background load for unknown controllers: {sorted(unknown)}")


@dataclass
class MetricsRecord:
    tick: int
    loads: dict
    levels: dict
    mean_rt_ms: float
    imbalance: float
    balancing_rate: float
    cum_cost: float
    cum_msgs: int
    migrations: int
    active_controllers: int
    notifications: int = 0
    level_changes: list = field(default_factory=list)
    plans: list = field(default_factory=list)
    scale_actions: list = field(default_factory=list)
    raw_total_before: int = 0
    raw_total_after: int = 0
    cum_migrations: int = 0


def response_time(load: float, base_service_ms: float = 2.0, saturation_exponent: float = 1.0) -> float:
    """Utilization-saturation curve: ``base / (1 - u) ** exponent``."""
    u = min(load, 99.9) / 100.0
    return base_service_ms / (1.0 - u) ** saturation_exponent


def network_imbalance(loads) -> float:
    """Fleet-wide mean absolute deviation of loads relative to their mean."""
    loads = list(loads)
    if not loads:
        raise ValueError("need at least one active controller")
    mean = math.fsum(loads) / len(loads)
    if mean <= 0.0:
        return 0.0
    return math.fsum(abs(x - mean) for x in loads) / len(loads) / mean


def balancing_rate(levels) -> float:
    levels = list(levels)
    if not levels:
        raise ValueError("need at least one active controller")
    return sum(1 for lv in levels if lv == LoadLevel.NORMAL) / len(levels)


def baseline_single_threshold(fleet: Fleet, source_id: str, threshold: float = 75.0) -> MigrationPlan | None:
    """Generic single-threshold rule: above ``threshold``, push the heaviest
    switch to the least-loaded other controller, unfiltered."""
    src = fleet.controllers[source_id]
    if not src.active or not src.load > threshold or not src.domain:
        return None
    others = [c for c in fleet.active() if c.id != source_id]
    if not others:
        return None
    sw = min(src.domain, key=lambda s: (-fleet.share_units(s, source_id), id_key(s)))
    if fleet.share_units(sw, source_id) == 0:
        return None
    tgt = min(others, key=lambda c: (c.load, id_key(c.id)))
    loads = {c.id: c.load for c in fleet.active()}
    mean_before = math.fsum(loads.values()) / len(loads)
    dc_before = imbalance_degree(loads[source_id], loads[tgt.id], mean_before)
    src_after = max(0.0, min(100.0, src.raw_load - fleet.share(sw, source_id)))
    tgt_after = max(0.0, min(100.0, tgt.raw_load + fleet.share(sw, tgt.id)))
    loads[source_id], loads[tgt.id] = src_after, tgt_after
    dc_after = imbalance_degree(src_after, tgt_after, math.fsum(loads.values()) / len(loads))
    cost = fleet.share(sw, tgt.id) * max(fleet.distance(sw, tgt.id), 1)
    theta = abs(dc_after - dc_before) / cost if cost > 0 else 0.0
    return MigrationPlan(sw, source_id, tgt.id, dc_before, dc_after, cost, theta, src_after, tgt_after)


class Simulation:
    def __init__(self, config: ScenarioConfig):
        self.config = config
        topo = config.topology
        self.fleet = Fleet(topo.graph, topo.controllers, topo.switches, config.weights,
                           config.thresholds, background=config.background)
        if config.workload.switch_ids != tuple(self.fleet.switch_ids):
            raise ValidationError("workload switch order does not match the topology")
        self.records: list[MetricsRecord] = []
        self.cum_cost = 0.0
        self.cum_msgs = 0
        self.cum_migrations = 0
        self.unsafe_migrations = 0
        self._rates = config.workload.rates_array()
        self._demands = np.empty((len(self.fleet.switch_ids), 3), dtype=np.float64)

    # -- strategy hooks -------------------------------------------------------
    def _apply(self, plan: MigrationPlan, tick, out, enforce_safety):
        fleet = self.fleet
        tgt = fleet.controllers[plan.target]
        before_ok = tgt.level in TARGET_LEVELS
        msgs = apply_plan(fleet, plan, self.config.planner, enforce_safety=enforce_safety)
        if not (before_ok and fleet.classify(tgt.load) in TARGET_LEVELS):
            self.unsafe_migrations += 1
        self.cum_msgs += msgs
        self.cum_cost += plan.cost
        self.cum_migrations += 1
        out.append(plan)

    def _balance_dlbmt(self, tick, plans, actions):
        fleet, cfg = self.fleet, self.config
        active = fleet.active()
        sources = sorted((c for c in active if c.level != LoadLevel.NORMAL),
                         key=lambda c: (-c.raw_units, id_key(c.id)))
        touched = set()
        scaled = False
        for src in sources:
            if src.id in touched or not src.active or src.level == LoadLevel.NORMAL:
                continue
            if src.level == LoadLevel.IDLE and self._may_shutdown(src, tick):
                sp = try_shutdown_idle(fleet, src.id, cfg.planner)
                if sp is not None:
                    for p in sp.migrations:
                        self._apply(p, tick, plans, enforce_safety=True)
                        touched.add(p.target)
                    fleet.power_off(src.id)
                    actions.append(("power_off", src.id))
                    touched.add(src.id)
                    continue
            plan = plan_migration(fleet, src.id, cfg.planner)
            if plan is not None:
                self._apply(plan, tick, plans, enforce_safety=True)
                touched.update((plan.source, plan.target))
                continue
            if not cfg.enable_scale_out or scaled:
                continue
            action = resolve_no_plan(fleet, src.id, cfg.planner)
            if action.kind is not ScaleKind.NONE:
                apply_scale_action(fleet, action, tick)
                actions.append((action.kind.value, action.controller))
                scaled = True

    def _may_shutdown(self, src, tick) -> bool:
        cfg = self.config
        if not cfg.enable_shutdown:
            return False
        active = self.fleet.active()
        if len(active) <= 1:
            return False
        if src.activated_at >= 0 and tick - src.activated_at < cfg.shutdown_cooldown_ticks:
            return False
        # capacity is only released while nobody is under pressure
        return all(c.level in TARGET_LEVELS for c in active)

    def _balance_single(self, tick, plans, actions):
        fleet = self.fleet
        sources = sorted((c for c in fleet.active() if c.load > self.config.single_threshold),
                         key=lambda c: (-c.raw_units, id_key(c.id)))
        for src in sources:
            plan = baseline_single_threshold(fleet, src.id, self.config.single_threshold)
            if plan is not None:
                self._apply(plan, tick, plans, enforce_safety=False)

    # -- loop -----------------------------------------------------------------
    def step(self, tick: int) -> MetricsRecord:
        cfg, fleet = self.config, self.fleet
        demands_for_tick(cfg.workload, tick, out=self._demands, rates=self._rates)
        fleet.set_demands(self._demands)
        fleet.level_log.clear()
        for c in fleet.active():
            fleet.refresh_level(c.id)

        raw_before = fleet.raw_total_units()
        plans, actions = [], []
        if tick % cfg.balance_every_n_ticks == 0:
            if cfg.strategy == "dlbmt":
                self._balance_dlbmt(tick, plans, actions)
            else:
                self._balance_single(tick, plans, actions)
        fleet.check_totality()

        notes = sum(ch.notifications for ch in fleet.level_log)
        self.cum_msgs += notes
        active = fleet.active()
        loads = {c.id: (c.load if c.active else None) for c in fleet.controllers.values()}
        levels = {c.id: (c.level if c.active else None) for c in fleet.controllers.values()}
        rec = MetricsRecord(
            tick=tick,
            loads=loads,
            levels=levels,
            mean_rt_ms=self._mean_response_time(),
            imbalance=network_imbalance(c.load for c in active),
            balancing_rate=balancing_rate(c.level for c in active),
            cum_cost=self.cum_cost,
            cum_msgs=self.cum_msgs,
            migrations=len(plans),
            active_controllers=len(active),
            notifications=notes,
            level_changes=list(fleet.level_log),
            plans=plans,
            scale_actions=actions,
            raw_total_before=raw_before,
            raw_total_after=fleet.raw_total_units(),
            cum_migrations=self.cum_migrations,
        )
        self.records.append(rec)
        return rec

    def _mean_response_time(self) -> float:
        cfg, fleet = self.config, self.fleet
        weights = fleet.requests()
        total = float(weights.sum())
        rt = {c.id: response_time(c.load, cfg.base_service_ms, cfg.saturation_exponent)
              for c in fleet.active()}
        if total <= 0.0:
            return math.fsum(rt.values()) / len(rt)
        acc = 0.0
        for sw, cid in fleet.owner.items():
            acc += float(weights[fleet.switch_index[sw]]) * rt[cid]
        return acc / total

    def run(self) -> list[MetricsRecord]:
        for tick in range(len(self.records), self.config.ticks):
            try:
                self.step(tick)
            except DLBMTError as exc:
                raise SimulationError(tick, exc) from exc
        return self.records


def run(config: ScenarioConfig) -> list[MetricsRecord]:
    return Simulation(config).run()
