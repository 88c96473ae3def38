"""Switch-migration planning: candidate selection, target filtering,
imbalance/efficiency ranking, idle shutdown and scale-out.

Planning functions only read the fleet; ``apply_plan`` and
``apply_scale_action`` are the only mutators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import (InactiveTarget, LastActiveController, StalePlanError,
                     SwitchNotInDomain, ZeroConsumption)
from .fleet import Fleet
from .load_model import CapacityVector, clamp_load, units_to_load
from .threshold import SOURCE_LEVELS, TARGET_LEVELS, LoadLevel
from .topology import id_key


@dataclass(frozen=True)
class PlannerConfig:
    efficiency_direction: str = "max"
    dc_mean_scope: str = "fleet"
    migration_protocol_messages: int = 6
    default_new_controller_capacity: CapacityVector | None = None
    max_added_controllers: int = 8
    shutdown_search_budget: int = 20000

    def __post_init__(self):
        if self.efficiency_direction not in ("max", "min"):
            raise ValueError(f"efficiency_direction must be 'max' or 'min', got {self.efficiency_direction!r}")
        if self.dc_mean_scope not in ("fleet", "pair"):
            raise ValueError(f"dc_mean_scope must be 'fleet' or 'pair', got {self.dc_mean_scope!r}")
        if self.migration_protocol_messages < 0:
            raise ValueError("migration_protocol_messages must be non-negative")


@dataclass(frozen=True)
class MigrationCandidate:
    switch: str
    epsilon_on_source: float
    psi: float
    share: float  # epsilon_on_source * 100, on the load grid
    hops: int


@dataclass(frozen=True)
class MigrationPlan:
    switch: str
    source: str
    target: str
    dc_before: float
    dc_after: float
    cost: float
    efficiency: float
    source_after: float
    target_after: float

    @property
    def improving(self) -> bool:
        return self.dc_after < self.dc_before


class ScaleKind(Enum):
    NONE = "none"
    POWER_ON = "power_on"
    ADD_CONTROLLER = "add_controller"


@dataclass(frozen=True)
class ScaleAction:
    kind: ScaleKind
    controller: str | None = None
    site: str | None = None
    capacity: CapacityVector | None = None


NO_ACTION = ScaleAction(ScaleKind.NONE)


@dataclass(frozen=True)
class ShutdownPlan:
    controller: str
    migrations: tuple[MigrationPlan, ...]


# -- formulas -------------------------------------------------------------------

def imbalance_degree(lr_j: float, lr_k: float, lr_mean: float) -> float:
    """Mean absolute deviation of two loads from ``lr_mean``, relative to it."""
    if lr_mean <= 0.0:
        return 0.0
    return (abs(lr_j - lr_mean) + abs(lr_k - lr_mean)) / (2.0 * lr_mean)


def migration_cost(eps_on_target: float, hops: int) -> float:
    if not eps_on_target > 0:
        raise ZeroConsumption("a switch with zero consumption is never migrated")
    return eps_on_target * 100.0 * max(hops, 1)


def migration_efficiency(dc_before: float, dc_after: float, cost: float) -> float:
    return abs(dc_after - dc_before) / cost


# -- planning ---------------------------------------------------------------------

def select_candidates(fleet: Fleet, source_id: str) -> list[MigrationCandidate]:
    """Switches whose consumption-to-distance ratio is at least the domain mean."""
    src = fleet.controllers[source_id]
    rows = []
    for sw in sorted(src.domain, key=id_key):
        share = fleet.share(sw, source_id)
        h = fleet.distance(sw, source_id)
        rows.append(MigrationCandidate(sw, share / 100.0, share / max(h, 1), share, h))
    if not rows:
        return []
    total = math.fsum(r.psi for r in rows)
    m = len(rows)
    chosen = [r for r in rows if r.psi * m >= total]
    chosen.sort(key=lambda r: (-r.psi, id_key(r.switch)))
    return chosen


def _project_units(fleet: Fleet, source_id: str, target_id: str, sw: str) -> tuple[int, int]:
    src = fleet.controllers[source_id]
    tgt = fleet.controllers[target_id]
    if fleet.owner.get(sw) != source_id:
        raise SwitchNotInDomain(f"switch {sw} is not in the domain of {source_id}")
    if not tgt.active or target_id == source_id:
        raise InactiveTarget(f"{target_id} is not an eligible target")
    return (src.raw_units - fleet.share_units(sw, source_id),
            tgt.raw_units + fleet.share_units(sw, target_id))


def project_loads(fleet: Fleet, source_id: str, target_id: str, sw: str) -> tuple[float, float]:
    """Source and target loads after moving ``sw``, each clamped to [0, 100]."""
    j, k = _project_units(fleet, source_id, target_id, sw)
    return clamp_load(units_to_load(j)), clamp_load(units_to_load(k))


def _mean(values) -> float:
    values = list(values)
    return math.fsum(values) / len(values)


def plan_migration(fleet: Fleet, source_id: str, config: PlannerConfig = PlannerConfig()) -> MigrationPlan | None:
    src = fleet.controllers[source_id]
    if not src.active or src.level not in SOURCE_LEVELS:
        return None
    active = fleet.active()
    targets = [c for c in active if c.id != source_id and c.level in TARGET_LEVELS]
    if not targets:
        return None
    loads = {c.id: c.load for c in active}
    fleet_mean = _mean(loads.values())

    retained = []
    for cand in select_candidates(fleet, source_id):
        if cand.share <= 0.0:
            continue
        best = None
        for tgt in targets:
            lr_j, lr_k = project_loads(fleet, source_id, tgt.id, cand.switch)
            if fleet.classify(lr_k) not in TARGET_LEVELS:
                continue
            if config.dc_mean_scope == "fleet":
                after = dict(loads)
                after[source_id] = lr_j
                after[tgt.id] = lr_k
                mean_after = _mean(after.values())
            else:
                mean_after = (lr_j + lr_k) / 2.0
            dc_after = imbalance_degree(lr_j, lr_k, mean_after)
            if best is None or dc_after < best[1]:
                best = (tgt, dc_after, lr_j, lr_k)
        if best is None:
            continue
        tgt, dc_after, lr_j, lr_k = best
        mean_before = fleet_mean if config.dc_mean_scope == "fleet" else (loads[source_id] + loads[tgt.id]) / 2.0
        dc_before = imbalance_degree(loads[source_id], loads[tgt.id], mean_before)
        if not dc_after < dc_before:
            continue
        cost = fleet.share(cand.switch, tgt.id) * max(fleet.distance(cand.switch, tgt.id), 1)
        if cost <= 0.0:
            continue
        theta = migration_efficiency(dc_before, dc_after, cost)
        retained.append(MigrationPlan(cand.switch, source_id, tgt.id, dc_before, dc_after,
                                      cost, theta, lr_j, lr_k))
    if not retained:
        return None
    sign = -1.0 if config.efficiency_direction == "max" else 1.0
    return min(retained, key=lambda p: (sign * p.efficiency, p.cost, id_key(p.switch)))


def _new_controller_id(fleet: Fleet) -> str:
    n = len(fleet.controllers) + 1
    while f"c{n}" in fleet.controllers:
        n += 1
    return f"c{n}"


def _farthest_site(fleet: Fleet) -> str:
    tables = [fleet.graph.distances_from(c.site) for c in fleet.controllers.values()]
    best, best_d = None, -1
    for node in fleet.graph.nodes:
        d = min(t[node] for t in tables)
        if d > best_d:
            best, best_d = node, d
    return best


def resolve_no_plan(fleet: Fleet, source_id: str, config: PlannerConfig = PlannerConfig()) -> ScaleAction:
    """What an unplannable source does: nothing, power a controller on, or add one."""
    src = fleet.controllers[source_id]
    if src.level != LoadLevel.OVERLOAD:
        return NO_ACTION
    off = fleet.inactive()
    if off:
        return ScaleAction(ScaleKind.POWER_ON, off[0].id)
    if sum(1 for c in fleet.controllers.values() if c.added) >= config.max_added_controllers:
        return NO_ACTION
    capacity = config.default_new_controller_capacity
    if capacity is None:
        capacity = next(iter(fleet.controllers.values())).capacity
    return ScaleAction(ScaleKind.ADD_CONTROLLER, _new_controller_id(fleet), _farthest_site(fleet), capacity)


def apply_scale_action(fleet: Fleet, action: ScaleAction, tick: int = -1):
    if action.kind is ScaleKind.POWER_ON:
        fleet.power_on(action.controller, tick)
    elif action.kind is ScaleKind.ADD_CONTROLLER:
        fleet.add_controller(action.controller, action.site, action.capacity, tick)


def try_shutdown_idle(fleet: Fleet, source_id: str, config: PlannerConfig = PlannerConfig()) -> ShutdownPlan | None:
    """Evacuation plan that lets an idle controller power off, if one exists.

    Switches are placed largest-consumption first, each trying targets in
    order of the imbalance degree the placement leaves; on a dead end the
    search backtracks (bounded by ``config.shutdown_search_budget``).
    """
    src = fleet.controllers[source_id]
    active = fleet.active()
    if len(active) <= 1:
        raise LastActiveController(f"{source_id} is the only active controller")
    if src.level != LoadLevel.IDLE:
        return None
    targets = [c for c in active if c.id != source_id and c.level in TARGET_LEVELS]
    switches = sorted(src.domain, key=lambda s: (-fleet.share_units(s, source_id), id_key(s)))
    if not switches:
        return ShutdownPlan(source_id, ())
    if not targets:
        return None

    others = {c.id: c.load for c in active if c.id != source_id}
    units = {t.id: t.raw_units for t in targets}
    src_units = src.raw_units
    placement: list[tuple[str, str]] = []
    budget = [config.shutdown_search_budget]

    def options(sw, src_left):
        lr_j = clamp_load(units_to_load(src_left))
        out = []
        for t in targets:
            k_units = units[t.id] + fleet.share_units(sw, t.id)
            lr_k = clamp_load(units_to_load(k_units))
            if fleet.classify(lr_k) not in TARGET_LEVELS:
                continue
            after = dict(others)
            after[t.id] = lr_k
            mean = _mean(list(after.values()) + [lr_j])
            out.append((imbalance_degree(lr_j, lr_k, mean), id_key(t.id), t.id, k_units))
        out.sort()
        return out

    def search(i, src_left):
        if i == len(switches):
            return True
        budget[0] -= 1
        if budget[0] < 0:
            return False
        sw = switches[i]
        left = src_left - fleet.share_units(sw, source_id)
        for _, _, tid, k_units in options(sw, left):
            prev = units[tid]
            units[tid] = k_units
            others[tid] = clamp_load(units_to_load(k_units))
            placement.append((sw, tid))
            if search(i + 1, left):
                return True
            placement.pop()
            units[tid] = prev
            others[tid] = clamp_load(units_to_load(prev))
        return False

    if not search(0, src_units):
        return None

    # replay the placement to record per-move figures
    loads = {c.id: c.load for c in active}
    raw = {c.id: c.raw_units for c in active}
    plans = []
    for sw, tid in placement:
        before_mean = _mean(loads.values())
        dc_before = imbalance_degree(loads[source_id], loads[tid], before_mean)
        raw[source_id] -= fleet.share_units(sw, source_id)
        raw[tid] += fleet.share_units(sw, tid)
        loads[source_id] = clamp_load(units_to_load(raw[source_id]))
        loads[tid] = clamp_load(units_to_load(raw[tid]))
        dc_after = imbalance_degree(loads[source_id], loads[tid], _mean(loads.values()))
        cost = fleet.share(sw, tid) * max(fleet.distance(sw, tid), 1)
        theta = migration_efficiency(dc_before, dc_after, cost) if cost > 0 else 0.0
        plans.append(MigrationPlan(sw, source_id, tid, dc_before, dc_after, cost, theta,
                                   loads[source_id], loads[tid]))
    return ShutdownPlan(source_id, tuple(plans))


def apply_plan(fleet: Fleet, plan: MigrationPlan, config: PlannerConfig = PlannerConfig(),
               enforce_safety: bool = True) -> int:
    """Move the planned switch and return the protocol messages it cost.

    With ``enforce_safety`` the target must be Idle/Normal both before and
    after the move; a violation means the plan went stale.
    """
    tgt = fleet.controllers[plan.target]
    if fleet.owner.get(plan.switch) != plan.source:
        raise StalePlanError(f"{plan.switch} is no longer in the domain of {plan.source}")
    if not tgt.active:
        raise StalePlanError(f"target {plan.target} is not active")
    if enforce_safety and tgt.level not in TARGET_LEVELS:
        raise StalePlanError(f"target {plan.target} is at {tgt.level.name}")
    fleet.move_switch(plan.switch, plan.source, plan.target)
    if enforce_safety and fleet.classify(tgt.load) not in TARGET_LEVELS:
        raise StalePlanError(f"moving {plan.switch} left {plan.target} at load {tgt.load:.3f}")
    fleet.refresh_level(plan.source)
    fleet.refresh_level(plan.target)
    return config.migration_protocol_messages
