from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict

from app.models.plan import PlanSolution, StaticDeployment

SCHEMA_VERSION = 1


class BlockDocument(BaseModel):
    aoi: int
    start: int
    length: int

    model_config = ConfigDict(from_attributes=True)


class SolutionDocument(BaseModel):
    """Plan or static deployment as written to disk.

    Static deployments carry one waypoint per drone, repeated over every slot.
    """

    schema_version: Literal[1] = SCHEMA_VERSION
    kind: Literal["planner", "baseline"]
    n_slots: int
    association: list[int]
    schedule: list[list[BlockDocument]]
    waypoints: list[list[list[float]]]
    start_slots: list[int]
    objective: float
    served_mean: float
    objective_log: list[float]
    delta_w_log: list[float]
    converged: bool
    iterations: int

    model_config = ConfigDict(extra="forbid")

    @classmethod
    def from_solution(cls, solution: PlanSolution | StaticDeployment) -> "SolutionDocument":
        if isinstance(solution, StaticDeployment):
            waypoints = [[list(map(float, point))] for point in solution.positions]
            start_slots = [0] * len(waypoints)
            objective_log: list[float] = []
            delta_w_log: list[float] = []
            objective = solution.mean_pathloss
        else:
            waypoints = [traj.waypoints.tolist() for traj in solution.trajectories]
            start_slots = list(solution.fleet_plan.start_slots)
            objective_log = list(solution.objective_log)
            delta_w_log = list(solution.delta_w_log)
            objective = solution.objective
        return cls(
            kind=solution.kind,
            n_slots=solution.schedule.n_slots,
            association=list(solution.association.owner),
            schedule=[
                [BlockDocument.model_validate(block) for block in blocks]
                for blocks in solution.schedule.blocks
            ],
            waypoints=waypoints,
            start_slots=start_slots,
            objective=objective,
            served_mean=solution.served_mean,
            objective_log=objective_log,
            delta_w_log=delta_w_log,
            converged=solution.converged,
            iterations=solution.iterations,
        )
