"""Resource demands and controller load.

A switch's weighted consumption of a controller is the convex combination
of its CPU, memory and bandwidth ratios against that controller's capacity.
A controller's load LR is the sum over its domain, in percent.

Loads are accumulated as integer multiples of 2**-32 percent points, so the
total load of a fleet does not depend on how switches are partitioned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InvalidWeights, UnknownSwitch, ValidationError


@dataclass(frozen=True)
class ResourceDemand:
    cpu: float = 0.0
    mem: float = 0.0
    bw: float = 0.0

    def __post_init__(self):
        if min(self.cpu, self.mem, self.bw) < 0:
            raise ValidationError(f"negative resource demand: {self}")


@dataclass(frozen=True)
class CapacityVector:
    cpu: float
    mem: float
    bw: float

    def __post_init__(self):
        if not min(self.cpu, self.mem, self.bw) > 0:
            raise ValidationError(f"capacity components must be positive: {self}")

    def scaled(self, factor: float) -> CapacityVector:
        return CapacityVector(self.cpu * factor, self.mem * factor, self.bw * factor)

    def as_tuple(self):
        return (self.cpu, self.mem, self.bw)


@dataclass(frozen=True)
class Weights:
    a: float = 1 / 3
    b: float = 1 / 3
    c: float = 1 / 3

    def __post_init__(self):
        if min(self.a, self.b, self.c) < 0 or abs(self.a + self.b + self.c - 1.0) > 1e-9:
            raise InvalidWeights(f"weights must be non-negative and sum to 1, got {self}")

    def as_tuple(self):
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class ModulationStep:
    from_tick: int
    to_tick: int  # exclusive
    multiplier: float


@dataclass(frozen=True)
class WorkloadProfile:
    """Per-switch packet-in rates plus the knobs that vary them over time.

    ``switch_ids`` fixes each switch's index, which keys its random stream.
    """

    switch_ids: tuple[str, ...]
    base_rates: dict = field(default_factory=dict)
    unit_costs: ResourceDemand = ResourceDemand(1.0, 1.0, 1.0)
    modulation: tuple[ModulationStep, ...] = ()
    seed: int = 0
    jitter: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.jitter < 1.0:
            raise ValidationError(f"jitter must lie in [0, 1), got {self.jitter}")
        if any(r < 0 for r in self.base_rates.values()):
            raise ValidationError("packet-in rates must be non-negative")
        if any(m.multiplier < 0 for m in self.modulation):
            raise ValidationError("modulation multipliers must be non-negative")
        unknown = set(self.base_rates) - set(self.switch_ids)
        if unknown:
            raise ValidationError(f"workload rates for unknown switches: {sorted(unknown)}")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.switch_ids)})

    def index_of(self, switch_id: str) -> int:
        try:
            return self._index[switch_id]
        except KeyError:
            raise UnknownSwitch(switch_id) from None

    def multiplier(self, tick: int) -> float:
        for step in self.modulation:
            if step.from_tick <= tick < step.to_tick:
                return step.multiplier
        return 1.0

    def rates_array(self) -> np.ndarray:
        return np.array([float(self.base_rates.get(s, 0.0)) for s in self.switch_ids])

    def unit_costs_array(self) -> np.ndarray:
        u = self.unit_costs
        return np.array([u.cpu, u.mem, u.bw], dtype=np.float64)


def demand_at_tick(profile: WorkloadProfile, switch_id: str, tick: int) -> ResourceDemand:
    if tick < 0:
        raise ValueError("tick must be non-negative")
    i = profile.index_of(switch_id)
    rate = float(profile.base_rates.get(switch_id, 0.0))
    mult = profile.multiplier(tick)
    if profile.jitter != 0.0:
        u = profile.jitter * (2.0 * kernels.uniform01(profile.seed, i, tick) - 1.0)
        scale = rate * mult * (1.0 + u)
    else:
        scale = rate * mult
    c = profile.unit_costs
    return ResourceDemand(scale * c.cpu, scale * c.mem, scale * c.bw)


def demands_for_tick(profile: WorkloadProfile, tick: int, out=None, rates=None) -> np.ndarray:
    """All switches' demands for one tick as an ``(n, 3)`` array."""
    n = len(profile.switch_ids)
    if out is None:
        out = np.empty((n, 3), dtype=np.float64)
    if rates is None:
        rates = profile.rates_array()
    kernels.fill_demands(profile.seed, tick, rates, profile.multiplier(tick),
                         profile.unit_costs_array(), profile.jitter, out)
    return out


def switch_consumption(d: ResourceDemand, cap: CapacityVector, w: Weights) -> float:
    """Weighted fraction of ``cap`` used by demand ``d``; each ratio clamps at 1."""
    if not isinstance(w, Weights):
        raise InvalidWeights(f"expected Weights, got {w!r}")
    eps = (w.a * min(d.cpu / cap.cpu, 1.0)
           + w.b * min(d.mem / cap.mem, 1.0)
           + w.c * min(d.bw / cap.bw, 1.0))
    return min(eps, 1.0)


def share_units(d, cap: CapacityVector, w: Weights) -> int:
    """Consumption in percent points as an integer count of 2**-32 units.

    ``d`` is a ResourceDemand or any (cpu, mem, bw) sequence.
    """
    if isinstance(d, ResourceDemand):
        dc, dm, db = d.cpu, d.mem, d.bw
    else:
        dc, dm, db = d
    return kernels.share_units(float(dc), float(dm), float(db),
                               cap.cpu, cap.mem, cap.bw, w.a, w.b, w.c)


def units_to_load(units: int) -> float:
    return units / kernels.SHARE_SCALE


def load_to_units(value: float) -> int:
    return int(round(value * kernels.SHARE_SCALE))


def switch_share(d, cap: CapacityVector, w: Weights) -> float:
    """``switch_consumption * 100`` on the 2**-32 grid."""
    return units_to_load(share_units(d, cap, w))


def raw_controller_load(demands, cap: CapacityVector, w: Weights, background: float = 0.0) -> float:
    total = load_to_units(background) + sum(share_units(d, cap, w) for d in demands)
    return units_to_load(total)


def controller_load(demands, cap: CapacityVector, w: Weights, background: float = 0.0) -> float:
    """LR in [0, 100]: summed consumption of a domain, in percent, clamped."""
    return clamp_load(raw_controller_load(demands, cap, w, background))


def clamp_load(value: float) -> float:
    if value < 0.0 or math.isnan(value):
        return 0.0
    return 100.0 if value > 100.0 else value
