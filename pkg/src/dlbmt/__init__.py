"""Multi-threshold controller load balancing for SDN control planes.

Public entry points: :func:`dlbmt.scenario.load_scenario` to build a
:class:`~dlbmt.simulator.ScenarioConfig`, :func:`dlbmt.simulator.run` to
simulate it, and the planner functions in :mod:`dlbmt.migration`.
"""
from .kernels import BACKEND
from .load_model import CapacityVector, ResourceDemand, Weights, WorkloadProfile
from .migration import MigrationPlan, PlannerConfig, plan_migration
from .scenario import load_scenario
from .simulator import MetricsRecord, ScenarioConfig, Simulation, run
from .threshold import LoadLevel, ThresholdConfig, classify

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CapacityVector", "ResourceDemand", "Weights", "WorkloadProfile", "MigrationPlan",
    "PlannerConfig", "plan_migration", "load_scenario", "MetricsRecord", "ScenarioConfig",
    "Simulation", "run", "LoadLevel", "ThresholdConfig", "classify",
]
