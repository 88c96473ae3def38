"""Mutable controller fleet: domains, per-tick demands, loads and levels.

All load bookkeeping is integer (2**-32 percent-point units); the float
``load``/``raw_load`` views are exact conversions of those integers.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DLBMTError, InactiveTarget, NoActiveController, SwitchNotInDomain
from .load_model import CapacityVector, Weights, clamp_load, load_to_units, units_to_load
from .threshold import (DEFAULT_THRESHOLDS, LoadLevel, ThresholdConfig, classify,
                        classify_with_hysteresis, update_level)
from .topology import ControllerSpec, NetworkGraph, SwitchSpec, assign_initial_domains, id_key


@dataclass
class ControllerState:
    id: str
    site: str
    capacity: CapacityVector
    active: bool = True
    raw_units: int = 0
    level: LoadLevel = LoadLevel.IDLE
    domain: set = field(default_factory=set)
    background: float = 0.0
    index: int = 0
    activated_at: int = -1
    added: bool = False

    @property
    def raw_load(self) -> float:
        return units_to_load(self.raw_units)

    @property
    def load(self) -> float:
        return clamp_load(self.raw_load)


@dataclass(frozen=True)
class LevelChange:
    controller: str
    old: LoadLevel
    new: LoadLevel
    notifications: int


class Fleet:
    def __init__(self, graph: NetworkGraph, controllers: list[ControllerSpec],
                 switches: list[SwitchSpec], weights: Weights = Weights(),
                 thresholds: ThresholdConfig = DEFAULT_THRESHOLDS,
                 background: dict | None = None, assignment: dict | None = None):
        self.graph = graph
        self.weights = weights
        self.thresholds = thresholds
        self.switch_ids = [s.id for s in switches]
        self.switch_index = {s: i for i, s in enumerate(self.switch_ids)}
        self.switch_site = {s.id: s.site for s in switches}
        self.controllers: dict[str, ControllerState] = {}
        background = background or {}
        for spec in controllers:
            self._append(ControllerState(
                id=spec.id, site=spec.site, capacity=spec.capacity,
                active=spec.initially_active, background=float(background.get(spec.id, 0.0)),
            ))
        if assignment is None:
            assignment = assign_initial_domains(graph, controllers, switches)
        self.owner: dict[str, str] = {}
        n = len(self.switch_ids)
        self._owner_idx = np.zeros(n, dtype=np.int64)
        self._cap_rows = np.ones((n, 3), dtype=np.float64)
        self._owner_units = np.zeros(n, dtype=np.int64)
        self._weights_arr = np.array(weights.as_tuple(), dtype=np.float64)
        self.demands = np.zeros((n, 3), dtype=np.float64)
        for sw in self.switch_ids:
            cid = assignment[sw]
            if not self.controllers[cid].active:
                raise InactiveTarget(f"switch {sw} assigned to inactive controller {cid}")
            self._set_owner(sw, cid)
        self.level_log: list[LevelChange] = []
        self.recompute_all()
        for c in self.active():
            c.level = self.classify(c.load)

    # -- construction helpers -------------------------------------------------
    def _append(self, state: ControllerState):
        state.index = len(self.controllers)
        self.controllers[state.id] = state

    def _set_owner(self, sw: str, cid: str):
        old = self.owner.get(sw)
        if old is not None:
            self.controllers[old].domain.discard(sw)
        c = self.controllers[cid]
        c.domain.add(sw)
        self.owner[sw] = cid
        i = self.switch_index[sw]
        self._owner_idx[i] = c.index
        self._cap_rows[i] = c.capacity.as_tuple()

    def add_controller(self, cid: str, site: str, capacity: CapacityVector, tick: int = -1) -> ControllerState:
        if cid in self.controllers:
            raise DLBMTError(f"controller {cid} already exists")
        if site not in self.graph.adjacency:
            raise DLBMTError(f"site {site} is not a node")
        state = ControllerState(id=cid, site=site, capacity=capacity, active=True,
                                activated_at=tick, added=True)
        self._append(state)
        state.level = self.classify(state.load)
        return state

    # -- queries --------------------------------------------------------------
    def active(self) -> list[ControllerState]:
        return sorted((c for c in self.controllers.values() if c.active), key=lambda c: id_key(c.id))

    def inactive(self) -> list[ControllerState]:
        return sorted((c for c in self.controllers.values() if not c.active), key=lambda c: id_key(c.id))

    def classify(self, load: float) -> LoadLevel:
        return classify(load, self.thresholds)

    def distance(self, sw: str, cid: str) -> int:
        return self.graph.distances_from(self.controllers[cid].site)[self.switch_site[sw]]

    def demand(self, sw: str) -> tuple[float, float, float]:
        row = self.demands[self.switch_index[sw]]
        return float(row[0]), float(row[1]), float(row[2])

    def share_units(self, sw: str, cid: str) -> int:
        """Consumption of ``sw`` on controller ``cid`` in integer load units."""
        i = self.switch_index[sw]
        if self.owner[sw] == cid:
            return int(self._owner_units[i])
        cap = self.controllers[cid].capacity
        d = self.demands[i]
        w = self.weights
        return kernels.share_units(float(d[0]), float(d[1]), float(d[2]),
                                   cap.cpu, cap.mem, cap.bw, w.a, w.b, w.c)

    def share(self, sw: str, cid: str) -> float:
        return units_to_load(self.share_units(sw, cid))

    def raw_total_units(self) -> int:
        return sum(c.raw_units for c in self.controllers.values() if c.active)

    def assignment(self) -> dict[str, str]:
        return dict(self.owner)

    def requests(self) -> np.ndarray:
        return self.demands.sum(axis=1)

    # -- mutation -------------------------------------------------------------
    def set_demands(self, demands: np.ndarray):
        self.demands = demands
        self.recompute_all()

    def recompute_all(self):
        kernels.owner_share_units(self.demands, self._cap_rows, self._weights_arr, self._owner_units)
        totals = np.zeros(len(self.controllers), dtype=np.int64)
        kernels.sum_by_owner(self._owner_units, self._owner_idx, len(self.controllers), totals)
        for c in self.controllers.values():
            c.raw_units = int(totals[c.index]) + load_to_units(c.background) if c.active else 0

    def _recompute_one(self, cid: str):
        c = self.controllers[cid]
        if not c.active:
            c.raw_units = 0
            return
        total = load_to_units(c.background)
        for sw in c.domain:
            total += int(self._owner_units[self.switch_index[sw]])
        c.raw_units = total

    def refresh_level(self, cid: str) -> int:
        """Reclassify one controller, logging a notification if its level moved."""
        c = self.controllers[cid]
        new = classify_with_hysteresis(c.load, c.level, self.thresholds)
        old = c.level
        changed, notes = update_level(c, new, len(self.active()))
        if changed:
            self.level_log.append(LevelChange(cid, old, new, notes))
        return notes

    def move_switch(self, sw: str, source: str, target: str):
        if self.owner.get(sw) != source:
            raise SwitchNotInDomain(f"switch {sw} is not in the domain of {source}")
        tgt = self.controllers[target]
        if not tgt.active:
            raise InactiveTarget(f"controller {target} is not active")
        units = self.share_units(sw, target)
        self._set_owner(sw, target)
        self._owner_units[self.switch_index[sw]] = units
        self._recompute_one(source)
        self._recompute_one(target)

    def power_on(self, cid: str, tick: int = -1):
        c = self.controllers[cid]
        c.active = True
        c.activated_at = tick
        self._recompute_one(cid)
        c.level = self.classify(c.load)

    def power_off(self, cid: str):
        c = self.controllers[cid]
        if c.domain:
            raise DLBMTError(f"cannot power off {cid}: domain not empty")
        if len(self.active()) <= 1:
            raise NoActiveController("cannot power off the last active controller")
        c.active = False
        c.raw_units = 0
        c.level = LoadLevel.IDLE

    def check_totality(self):
        """Every switch owned by exactly one active controller."""
        seen = {}
        for c in self.controllers.values():
            if not c.active and c.domain:
                raise DLBMTError(f"inactive controller {c.id} still owns switches")
            for sw in c.domain:
                if sw in seen:
                    raise DLBMTError(f"switch {sw} owned by {seen[sw]} and {c.id}")
                seen[sw] = c.id
        if set(seen) != set(self.switch_ids) or any(self.owner[s] != seen[s] for s in seen):
            raise DLBMTError("domain assignment is not total")
