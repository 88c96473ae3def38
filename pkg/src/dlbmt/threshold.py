"""Four-level load classification and level-change notification counting."""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from .errors import OutOfRange, ValidationError


class LoadLevel(IntEnum):
    IDLE = 1
    NORMAL = 2
    HIGH_LOAD = 3
    OVERLOAD = 4

    def __str__(self):
        return self.name


TARGET_LEVELS = frozenset({LoadLevel.IDLE, LoadLevel.NORMAL})
SOURCE_LEVELS = frozenset({LoadLevel.IDLE, LoadLevel.HIGH_LOAD, LoadLevel.OVERLOAD})


@dataclass(frozen=True)
class ThresholdConfig:
    bounds: tuple[float, ...] = (25.0, 50.0, 75.0, 100.0)
    hysteresis: float = 0.0

    def __post_init__(self):
        b = tuple(float(x) for x in self.bounds)
        object.__setattr__(self, "bounds", b)
        if len(b) != 4:
            raise ValidationError(f"thresholds need exactly 4 values, got {len(b)}")
        if any(x >= y for x, y in zip(b, b[1:])):
            raise ValidationError(f"thresholds must be strictly ascending: {list(b)}")
        if b[-1] != 100.0:
            raise ValidationError("last threshold must be 100")
        if self.hysteresis < 0:
            raise ValidationError("hysteresis band must be non-negative")


DEFAULT_THRESHOLDS = ThresholdConfig()


def classify(load: float, q: ThresholdConfig = DEFAULT_THRESHOLDS) -> LoadLevel:
    """Level of the first threshold strictly above ``load``; 100 is Overload."""
    if not 0.0 <= load <= 100.0:
        raise OutOfRange(f"load {load} outside [0, 100]")
    for i, bound in enumerate(q.bounds):
        if load < bound:
            return LoadLevel(i + 1)
    return LoadLevel.OVERLOAD


def classify_with_hysteresis(load: float, previous: LoadLevel | None,
                             q: ThresholdConfig = DEFAULT_THRESHOLDS) -> LoadLevel:
    """Like :func:`classify`, but a downward move needs ``load`` to clear the
    lower bound of the previous level by ``q.hysteresis``."""
    level = classify(load, q)
    if previous is None or q.hysteresis <= 0 or level >= previous or previous == LoadLevel.IDLE:
        return level
    if load >= q.bounds[previous - 2] - q.hysteresis:
        return previous
    return level


def update_level(state, new_level: LoadLevel, active_count: int) -> tuple[bool, int]:
    """Store ``new_level`` on ``state``; a change notifies every other active controller."""
    if state.level == new_level:
        return False, 0
    state.level = new_level
    return True, max(active_count - 1, 0)
