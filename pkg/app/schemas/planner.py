from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

InitMode = Literal["kmeans_circle", "kmeans_point", "uniform_circle", "uniform_point"]


class PlannerConfig(BaseModel):
    epsilon_w: float = Field(default=0.1, gt=0)
    max_iterations: int = Field(default=100, ge=1)
    init_radius: float = Field(default=1.0, ge=0)
    init_height: float = Field(default=80.0, gt=0)
    seed: int = 0
    init_mode: InitMode = "kmeans_circle"
    kmeans_restarts: int = Field(default=10, ge=1)

    model_config = ConfigDict(frozen=True, extra="forbid")


class PSOParams(BaseModel):
    swarm_size: int = Field(default=40, ge=1)
    inertia: float = Field(default=0.72, ge=0)
    cognitive: float = Field(default=1.49, ge=0)
    social: float = Field(default=1.49, ge=0)
    iterations: int = Field(default=300, ge=1)
    rounds: int = Field(default=2, ge=1)
    seed: int = 0

    model_config = ConfigDict(frozen=True, extra="forbid")
