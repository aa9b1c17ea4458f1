from __future__ import annotations

import dataclasses
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from app.models.channel import D2BEnvParams, D2UEnvParams
from app.models.scenario import Scenario

SCHEMA_VERSION = 1


class D2UEnvDocument(BaseModel):
    a: float = 4.88
    b: float = 0.43
    eta_los: float = 0.1
    eta_nlos: float = 21.0
    f_c: float = 2.4e9

    model_config = ConfigDict(extra="forbid")


class D2BEnvDocument(BaseModel):
    alpha: float = 3.04
    A_excess: float = -23.29
    theta0: float = -3.61
    B_scale: float = 4.14
    eta0: float = 20.7
    p_db_max: float = 80.0

    model_config = ConfigDict(extra="forbid")


class ScenarioOverrides(BaseModel):
    """Partial scenario used as a template in experiment files."""

    r_bs: float | None = Field(default=None, gt=0)
    grid_len: float | None = Field(default=None, gt=0)
    n_aois: int = Field(default=20, ge=0)
    n_drones: int | None = Field(default=None, ge=1)
    n_slots: int | None = Field(default=None, ge=1)
    v_max: float | None = Field(default=None, gt=0)
    h_max_rate: float | None = Field(default=None, ge=0)
    z_min: float | None = Field(default=None, ge=0)
    s_min: int | None = Field(default=None, ge=1)
    capacity: int | None = Field(default=None, ge=1)
    h_min: float | None = Field(default=None, gt=0)
    h_ceiling: float | None = Field(default=None, gt=0)
    p_db_max: float | None = None

    model_config = ConfigDict(extra="forbid")

    def apply(self, template: Scenario) -> Scenario:
        changes = self.model_dump(exclude_none=True, exclude={"n_aois", "p_db_max"})
        scenario = template.replace(**changes)
        if self.p_db_max is not None:
            scenario = scenario.replace(
                d2b_env=dataclasses.replace(scenario.d2b_env, p_db_max=self.p_db_max)
            )
        return scenario


class ScenarioDocument(BaseModel):
    schema_version: Literal[1] = SCHEMA_VERSION
    r_bs: float
    grid_len: float
    aois: list[tuple[float, float]]
    n_drones: int
    n_slots: int
    v_max: float
    h_max_rate: float
    z_min: float
    s_min: int
    capacity: int
    h_min: float
    h_ceiling: float
    seed: int
    d2u_env: D2UEnvDocument
    d2b_env: D2BEnvDocument

    model_config = ConfigDict(extra="forbid")

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> "ScenarioDocument":
        return cls(
            r_bs=scenario.r_bs,
            grid_len=scenario.grid_len,
            aois=[tuple(aoi) for aoi in scenario.aois],
            n_drones=scenario.n_drones,
            n_slots=scenario.n_slots,
            v_max=scenario.v_max,
            h_max_rate=scenario.h_max_rate,
            z_min=scenario.z_min,
            s_min=scenario.s_min,
            capacity=scenario.capacity,
            h_min=scenario.h_min,
            h_ceiling=scenario.h_ceiling,
            seed=scenario.seed,
            d2u_env=D2UEnvDocument(**vars(scenario.d2u_env)),
            d2b_env=D2BEnvDocument(**vars(scenario.d2b_env)),
        )

    def to_scenario(self) -> Scenario:
        data = self.model_dump(exclude={"schema_version", "d2u_env", "d2b_env"})
        data["aois"] = tuple(tuple(aoi) for aoi in self.aois)
        return Scenario(
            **data,
            d2u_env=D2UEnvParams(**self.d2u_env.model_dump()),
            d2b_env=D2BEnvParams(**self.d2b_env.model_dump()),
        )
