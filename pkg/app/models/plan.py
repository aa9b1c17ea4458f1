from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from app.models.scenario import FleetPlan, Trajectory

IDLE = -1


@dataclass(frozen=True)
class Association:
    """Owning drone per AoI (a_{d,u} in matrix form via matrix())."""

    owner: tuple[int, ...]
    n_drones: int

    def aois_of(self, drone: int) -> list[int]:
        return [aoi for aoi, owner in enumerate(self.owner) if owner == drone]

    def counts(self) -> list[int]:
        return [sum(1 for owner in self.owner if owner == d) for d in range(self.n_drones)]

    def matrix(self) -> np.ndarray:
        a = np.zeros((self.n_drones, len(self.owner)), dtype=int)
        for aoi, owner in enumerate(self.owner):
            a[owner, aoi] = 1
        return a


@dataclass(frozen=True)
class Block:
    aoi: int
    start: int
    length: int

    def slots(self, n_slots: int) -> list[int]:
        return [(self.start + i) % n_slots for i in range(self.length)]


@dataclass
class Schedule:
    """Per-drone contiguous cyclic blocks and the derived slot-to-AoI table."""

    blocks: list[list[Block]]
    n_slots: int

    @property
    def serving(self) -> np.ndarray:
        table = np.full((len(self.blocks), self.n_slots), IDLE, dtype=int)
        for drone, drone_blocks in enumerate(self.blocks):
            for block in drone_blocks:
                table[drone, block.slots(self.n_slots)] = block.aoi
        return table

    def matrix(self, n_aois: int) -> np.ndarray:
        """k_{d,u}[n] as a (D, U, N) binary array."""
        serving = self.serving
        k = np.zeros((len(self.blocks), n_aois, self.n_slots), dtype=int)
        drones, slots = np.nonzero(serving >= 0)
        k[drones, serving[drones, slots], slots] = 1
        return k


@dataclass(frozen=True)
class Objective:
    mean_pathloss: float
    served_mean: float
    total: float
    n_samples: int


@dataclass
class PlanSolution:
    association: Association
    schedule: Schedule
    fleet_plan: FleetPlan
    objective: float
    served_mean: float
    objective_log: list[float] = field(default_factory=list)
    delta_w_log: list[float] = field(default_factory=list)
    converged: bool = False
    runtime_s: float = 0.0
    kind: str = "planner"

    @property
    def iterations(self) -> int:
        return len(self.objective_log)

    @property
    def trajectories(self) -> list[Trajectory]:
        return self.fleet_plan.trajectories


@dataclass
class StaticDeployment:
    positions: np.ndarray
    association: Association
    schedule: Schedule
    objective: float
    mean_pathloss: float
    initial_objective: float
    runtime_s: float = 0.0
    kind: str = "baseline"

    @property
    def fleet_plan(self) -> FleetPlan:
        trajectories = [
            Trajectory.hover(drone, point, self.schedule.n_slots)
            for drone, point in enumerate(self.positions)
        ]
        return FleetPlan(trajectories=trajectories, start_slots=[0] * len(trajectories))

    @property
    def trajectories(self) -> list[Trajectory]:
        return self.fleet_plan.trajectories

    @property
    def served_mean(self) -> float:
        return self.objective

    @property
    def converged(self) -> bool:
        return True

    @property
    def iterations(self) -> int:
        return 0
