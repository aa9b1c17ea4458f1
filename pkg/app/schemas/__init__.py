from app.schemas.experiment import (
    CdfJob,
    CompareJob,
    ExperimentConfig,
    InitCompareJob,
    MinDbsJob,
    SpeedFleetSweepJob,
    TrajectoriesJob,
)
from app.schemas.planner import PlannerConfig, PSOParams
from app.schemas.scenario import ScenarioDocument, ScenarioOverrides
from app.schemas.solution import BlockDocument, SolutionDocument

__all__ = [
    "BlockDocument",
    "CdfJob",
    "CompareJob",
    "ExperimentConfig",
    "InitCompareJob",
    "MinDbsJob",
    "PSOParams",
    "PlannerConfig",
    "ScenarioDocument",
    "ScenarioOverrides",
    "SolutionDocument",
    "SpeedFleetSweepJob",
    "TrajectoriesJob",
]
