from app.models.channel import D2BEnvParams, D2UEnvParams, HeightInterval
from app.models.metrics import Metrics
from app.models.plan import (
    IDLE,
    Association,
    Block,
    Objective,
    PlanSolution,
    Schedule,
    StaticDeployment,
)
from app.models.scenario import FleetPlan, Scenario, Trajectory

__all__ = [
    "IDLE",
    "Association",
    "Block",
    "D2BEnvParams",
    "D2UEnvParams",
    "FleetPlan",
    "HeightInterval",
    "Metrics",
    "Objective",
    "PlanSolution",
    "Scenario",
    "Schedule",
    "StaticDeployment",
    "Trajectory",
]
