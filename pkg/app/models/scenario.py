from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from app.core.exceptions import InvalidParameterError, StructuralError
from app.models.channel import D2BEnvParams, D2UEnvParams


@dataclass(frozen=True)
class Scenario:
    """A BS-centred grid with AoIs, a fleet size and its kinematic limits.

    Distances are in metres and speeds in metres per slot.
    """

    r_bs: float = 900.0
    grid_len: float = 20.0
    aois: tuple[tuple[float, float], ...] = ()
    n_drones: int = 5
    n_slots: int = 60
    v_max: float = 90.0
    h_max_rate: float = 10.0
    z_min: float = 200.0
    s_min: int = 10
    capacity: int = 6
    d2u_env: D2UEnvParams = field(default_factory=D2UEnvParams)
    d2b_env: D2BEnvParams = field(default_factory=D2BEnvParams)
    seed: int = 0
    h_min: float = 30.0
    h_ceiling: float = 300.0

    def __post_init__(self) -> None:
        if self.r_bs <= 0 or self.grid_len <= 0:
            raise InvalidParameterError("Coverage radius and grid size must be positive.")
        if self.n_drones < 1 or self.n_slots < 1:
            raise InvalidParameterError("A scenario needs at least one drone and one slot.")
        if self.v_max <= 0 or self.h_max_rate < 0 or self.z_min < 0:
            raise InvalidParameterError("Kinematic limits must be non-negative.")
        if not 1 <= self.s_min <= self.n_slots:
            raise InvalidParameterError("s_min must lie in [1, n_slots].")
        if self.capacity < 1:
            raise InvalidParameterError("Per-drone AoI capacity must be at least 1.")
        if not 0.0 < self.h_min <= self.h_ceiling:
            raise InvalidParameterError("Flying altitude bounds must satisfy 0 < h_min <= h_ceiling.")

    @cached_property
    def aoi_array(self) -> np.ndarray:
        return np.asarray(self.aois, dtype=float).reshape(-1, 2)

    @property
    def n_aois(self) -> int:
        return len(self.aois)

    @property
    def aoi_capacity(self) -> int:
        """Effective per-drone AoI cap: capacity and the S_min slot budget."""
        return min(self.capacity, self.n_slots // self.s_min)

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)


@dataclass
class Trajectory:
    drone_id: int
    waypoints: np.ndarray

    def __post_init__(self) -> None:
        self.waypoints = np.asarray(self.waypoints, dtype=float)
        if self.waypoints.ndim != 2 or self.waypoints.shape[1] != 3:
            raise StructuralError("Trajectory waypoints must have shape (N, 3).")

    @property
    def n_slots(self) -> int:
        return int(self.waypoints.shape[0])

    @property
    def horizontal(self) -> np.ndarray:
        return self.waypoints[:, :2]

    @property
    def heights(self) -> np.ndarray:
        return self.waypoints[:, 2]

    @classmethod
    def hover(cls, drone_id: int, point: np.ndarray, n_slots: int) -> "Trajectory":
        return cls(drone_id=drone_id, waypoints=np.tile(np.asarray(point, dtype=float), (n_slots, 1)))


@dataclass
class FleetPlan:
    trajectories: list[Trajectory]
    start_slots: list[int]

    def __post_init__(self) -> None:
        if len(self.trajectories) != len(self.start_slots):
            raise StructuralError("One start slot is required per trajectory.")
        lengths = {traj.n_slots for traj in self.trajectories}
        if len(lengths) > 1:
            raise StructuralError("All trajectories must share the same slot count.")

    @property
    def n_slots(self) -> int:
        return self.trajectories[0].n_slots if self.trajectories else 0

    def positions(self) -> np.ndarray:
        """(D, N, 3) positions in fleet time; drone d is at W_d[(t + s_d) mod N]."""
        if not self.trajectories:
            return np.zeros((0, 0, 3))
        return np.stack(
            [
                np.roll(traj.waypoints, -offset, axis=0)
                for traj, offset in zip(self.trajectories, self.start_slots)
            ]
        )
