from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field

from app.schemas.planner import InitMode, PlannerConfig, PSOParams
from app.schemas.scenario import ScenarioOverrides

Mode = Literal["planner", "baseline"]


class _Job(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TrajectoriesJob(_Job):
    """Single planner run; writes scenario.json, solution.json and fig3_trajectories.csv."""

    kind: Literal["trajectories"]
    seed: int = 0
    n_drones: int = Field(default=5, ge=1)
    v_max: float = Field(default=90.0, gt=0)


class CdfJob(_Job):
    """Pathloss CDFs over speeds (fig5_cdf.csv) and over fleet sizes (fig6_cdf.csv)."""

    kind: Literal["cdf"]
    v_max_values: list[float] = Field(default_factory=lambda: [30.0, 70.0, 110.0], min_length=1)
    n_drones_values: list[int] = Field(default_factory=lambda: [4, 5, 6, 7], min_length=1)
    n_drones: int = Field(default=5, ge=1)
    v_max: float = Field(default=90.0, gt=0)
    seeds: list[int] = Field(default_factory=lambda: [0], min_length=1)


class SpeedFleetSweepJob(_Job):
    """Speed x fleet sweep; writes metrics.csv and fig7_means.csv."""

    kind: Literal["speed_fleet_sweep"]
    v_max_values: list[float] = Field(
        default_factory=lambda: [30.0, 50.0, 70.0, 90.0, 110.0], min_length=1
    )
    n_drones_values: list[int] = Field(default_factory=lambda: [4, 5, 6, 7], min_length=1)
    seeds: list[int] | None = None
    mode: Mode = "planner"


class CompareJob(_Job):
    """Planner against the static baseline; writes fig9_compare.csv and table2_std.csv."""

    kind: Literal["compare"]
    n_drones_values: list[int] = Field(default_factory=lambda: [4, 5, 6, 7], min_length=1)
    v_max: float = Field(default=90.0, gt=0)
    v_max_values: list[float] = Field(
        default_factory=lambda: [30.0, 50.0, 70.0, 90.0, 110.0], min_length=1
    )
    seeds: list[int] | None = None


class MinDbsJob(_Job):
    """Smallest fleet meeting each pathloss threshold; writes table3_min_dbs.csv."""

    kind: Literal["min_dbs"]
    thresholds: list[float] = Field(default_factory=lambda: [98.0, 100.0, 102.0], min_length=1)
    v_max_values: list[float] = Field(default_factory=lambda: [30.0, 90.0], min_length=1)
    modes: list[Mode] = Field(default_factory=lambda: ["planner", "baseline"], min_length=1)
    seed: int = 0


class InitCompareJob(_Job):
    """Initial-trajectory variants side by side; writes fig8_init.csv."""

    kind: Literal["init_compare"]
    init_modes: list[InitMode] = Field(
        default_factory=lambda: ["kmeans_circle", "kmeans_point", "uniform_circle", "uniform_point"],
        min_length=1,
    )
    n_drones: int = Field(default=5, ge=1)
    v_max: float = Field(default=90.0, gt=0)
    seeds: list[int] | None = None


Job = Annotated[
    Union[TrajectoriesJob, CdfJob, SpeedFleetSweepJob, CompareJob, MinDbsJob, InitCompareJob],
    Field(discriminator="kind"),
]


class ExperimentConfig(BaseModel):
    schema_version: Literal[1] = 1
    scenario: ScenarioOverrides = Field(default_factory=ScenarioOverrides)
    planner: PlannerConfig = Field(default_factory=PlannerConfig)
    pso: PSOParams = Field(default_factory=PSOParams)
    seeds: list[int] | None = None
    jobs: list[Job] = Field(default_factory=list)

    model_config = ConfigDict(extra="forbid")
