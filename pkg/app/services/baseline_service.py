"""Static deployment baseline: one hover point per drone, placed by per-drone PSO."""
from __future__ import annotations

import math
import time

import numpy as np
import structlog

from app.core.assignment import capacity_assignment
from app.core.channel import d2u_pathloss
from app.core.exceptions import InfeasibleError, SeparationInfeasibleError
from app.core.geometry import horizontal_range
from app.models.plan import Association, Objective, Schedule, StaticDeployment
from app.models.scenario import Scenario, Trajectory
from app.schemas.planner import PSOParams
from app.services.association_service import blocks_for, optimize_schedule
from app.services.planner_service import objective_value
from app.services.scenario_service import HeightProfile, height_bounds

logger = structlog.get_logger(__name__)

PLACEMENT_ATTEMPTS = 10_000
VELOCITY_FRACTION = 0.2


def _hover(positions: np.ndarray, n_slots: int) -> list[Trajectory]:
    return [Trajectory.hover(d, p, n_slots) for d, p in enumerate(positions)]


def _snap(point: np.ndarray, scenario: Scenario) -> np.ndarray | None:
    """Clamp the height into the exact working-zone band, or None if there is none."""
    bounds = height_bounds(scenario, horizontal_range(point))
    if bounds.empty:
        return None
    return np.array([point[0], point[1], min(max(point[2], bounds.lower), bounds.upper)])


def _far_enough(point: np.ndarray, others: np.ndarray, z_min: float) -> bool:
    return len(others) == 0 or float(np.linalg.norm(others - point, axis=1).min()) >= z_min


class StaticPSOService:
    def __init__(self, scenario: Scenario, params: PSOParams | None = None) -> None:
        self._scenario = scenario
        self._params = params or PSOParams()
        self._rng = np.random.default_rng(self._params.seed)
        self._profile = HeightProfile(scenario)

    def _sample(self, size: int) -> np.ndarray:
        s = self._scenario
        radius = s.r_bs * np.sqrt(self._rng.uniform(size=size))
        angle = self._rng.uniform(0.0, 2.0 * math.pi, size=size)
        heights = self._rng.uniform(s.h_min, s.h_ceiling, size=size)
        return np.column_stack([radius * np.cos(angle), radius * np.sin(angle), heights])

    def _project(self, particles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        r = np.hypot(particles[:, 0], particles[:, 1])
        scale = np.where(r > self._scenario.r_bs, self._scenario.r_bs / np.maximum(r, 1e-12), 1.0)
        particles[:, :2] *= scale[:, None]
        heights, valid = self._profile.clamp(np.hypot(particles[:, 0], particles[:, 1]), particles[:, 2])
        particles[:, 2] = heights
        return particles, valid

    def initial_positions(self) -> np.ndarray:
        s = self._scenario
        placed: list[np.ndarray] = []
        for _ in range(PLACEMENT_ATTEMPTS):
            candidate = _snap(self._sample(1)[0], s)
            if candidate is not None and _far_enough(candidate, np.array(placed).reshape(-1, 3), s.z_min):
                placed.append(candidate)
                if len(placed) == s.n_drones:
                    return np.array(placed)
        raise SeparationInfeasibleError(
            f"Could not place {s.n_drones} static drones {s.z_min} m apart."
        )

    def associate(self, positions: np.ndarray) -> Association:
        s = self._scenario
        if s.aoi_capacity * s.n_drones < s.n_aois:
            raise InfeasibleError(
                f"{s.n_drones} drones x {s.aoi_capacity} AoIs each cannot cover {s.n_aois} AoIs.",
                constraint="capacity",
            )
        offsets = positions[:, None, :2] - s.aoi_array[None, :, :]
        r = np.hypot(offsets[..., 0], offsets[..., 1])
        cost = d2u_pathloss(r, positions[:, 2:3], s.d2u_env) if s.n_aois else np.zeros((s.n_drones, 0))
        result = capacity_assignment(cost, s.aoi_capacity)
        return Association(owner=result.owner, n_drones=s.n_drones)

    def evaluate(self, positions: np.ndarray, assoc: Association) -> tuple[Schedule, Objective]:
        trajectories = _hover(positions, self._scenario.n_slots)
        schedule = optimize_schedule(self._scenario, trajectories, assoc)
        return schedule, objective_value(assoc, schedule, trajectories, self._scenario)

    def _drone_fitness(self, particles: np.ndarray, aois: list[int], others: np.ndarray) -> np.ndarray:
        """Served-slot pathloss sum of one drone over its AoIs' fair time shares."""
        s = self._scenario
        targets = s.aoi_array[aois]
        shares = np.array(blocks_for(s.n_slots, len(aois)), dtype=float)
        r = np.hypot(particles[:, None, 0] - targets[None, :, 0], particles[:, None, 1] - targets[None, :, 1])
        fitness = (d2u_pathloss(r, particles[:, 2:3], s.d2u_env) * shares[None, :]).sum(axis=1)
        if len(others):
            gaps = np.linalg.norm(particles[:, None, :] - others[None, :, :], axis=2).min(axis=1)
            fitness = np.where(gaps >= s.z_min, fitness, np.inf)
        return fitness

    def place_drone(self, current: np.ndarray, aois: list[int], others: np.ndarray) -> np.ndarray:
        p = self._params
        s = self._scenario
        particles = self._sample(p.swarm_size)
        particles[0] = current
        particles, valid = self._project(particles)
        particles[0] = current
        span = np.array([2.0 * s.r_bs, 2.0 * s.r_bs, s.h_ceiling - s.h_min])
        v_limit = VELOCITY_FRACTION * span
        velocity = self._rng.uniform(-v_limit, v_limit, size=particles.shape)

        fitness = np.where(valid, self._drone_fitness(particles, aois, others), np.inf)
        fitness[0] = self._drone_fitness(current[None, :], aois, others)[0]
        best, best_fit = particles.copy(), fitness.copy()
        leader = int(np.argmin(best_fit))
        for _ in range(p.iterations):
            r1 = self._rng.uniform(size=particles.shape)
            r2 = self._rng.uniform(size=particles.shape)
            velocity = (
                p.inertia * velocity
                + p.cognitive * r1 * (best - particles)
                + p.social * r2 * (best[leader] - particles)
            )
            velocity = np.clip(velocity, -v_limit, v_limit)
            particles, valid = self._project(particles + velocity)
            fitness = np.where(valid, self._drone_fitness(particles, aois, others), np.inf)
            improved = fitness < best_fit
            best[improved], best_fit[improved] = particles[improved], fitness[improved]
            leader = int(np.argmin(best_fit))

        candidate = _snap(best[leader], s)
        if candidate is None:
            return current
        score = self._drone_fitness(candidate[None, :], aois, others)[0]
        return candidate if score <= self._drone_fitness(current[None, :], aois, others)[0] else current

    def run(self) -> StaticDeployment:
        started = time.perf_counter()
        s = self._scenario
        positions = self.initial_positions()
        assoc = self.associate(positions)
        schedule, objective = self.evaluate(positions, assoc)
        initial = objective.served_mean

        for round_index in range(self._params.rounds):
            for drone in range(s.n_drones):
                aois = assoc.aois_of(drone)
                if not aois:
                    continue
                others = np.delete(positions, drone, axis=0)
                trial = positions.copy()
                trial[drone] = self.place_drone(positions[drone], aois, others)
                trial_assoc = self.associate(trial)
                trial_schedule, trial_objective = self.evaluate(trial, trial_assoc)
                if trial_objective.served_mean <= objective.served_mean:
                    positions, assoc, schedule, objective = trial, trial_assoc, trial_schedule, trial_objective
                logger.debug(
                    "pso_drone_placed",
                    round=round_index,
                    drone=drone,
                    served_mean=objective.served_mean,
                )

        return StaticDeployment(
            positions=positions,
            association=assoc,
            schedule=schedule,
            objective=objective.served_mean,
            mean_pathloss=objective.mean_pathloss,
            initial_objective=initial,
            runtime_s=time.perf_counter() - started,
        )


def plan_static_pso(scenario: Scenario, pso_params: PSOParams | None = None) -> StaticDeployment:
    return StaticPSOService(scenario, pso_params).run()
