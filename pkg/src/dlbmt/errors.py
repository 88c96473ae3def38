"""Exception hierarchy shared by every dlbmt module."""


class DLBMTError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(DLBMTError):
    """Scenario or run configuration is unusable (CLI exit status 1)."""


class ParseError(ConfigError):
    pass


class ValidationError(ConfigError):
    pass


class NodeNotFound(DLBMTError, KeyError):
    pass


class NoActiveController(DLBMTError):
    pass


class UnknownSwitch(DLBMTError, KeyError):
    pass


class InvalidWeights(ConfigError):
    pass


class OutOfRange(DLBMTError, ValueError):
    pass


class SwitchNotInDomain(DLBMTError):
    pass


class InactiveTarget(DLBMTError):
    pass


class ZeroConsumption(DLBMTError, ValueError):
    pass


class LastActiveController(DLBMTError):
    pass


class StalePlanError(DLBMTError):
    """A plan no longer matches the fleet it is applied to."""


class SimulationError(DLBMTError):
    """Wraps any failure inside the tick loop with the tick it happened on."""

    def __init__(self, tick, cause):
        super().__init__(f"tick {tick}: {cause}")
        self.tick = tick
        self.cause = cause
