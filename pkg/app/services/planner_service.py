from __future__ import annotations

import math
import time

import numpy as np
import structlog
from scipy.optimize import minimize

from app.config import Settings, get_settings
from app.core.channel import d2u_pathloss
from app.core.exceptions import (
    InfeasibleError,
    PlanValidationError,
    SeparationInfeasibleError,
    StructuralError,
)
from app.core.geometry import horizontal_range
from app.models.plan import IDLE, Association, Objective, PlanSolution, Schedule, StaticDeployment
from app.models.scenario import FleetPlan, Scenario, Trajectory
from app.schemas.planner import PlannerConfig
from app.services.association_service import (
    optimize_association,
    optimize_schedule,
    pathloss_table,
    validate_schedule,
)
from app.services.scenario_service import (
    grid_cell_centers,
    height_bounds,
    validate_separation,
    validate_trajectory,
)
from app.services.trajectory_service import sweep_update

logger = structlog.get_logger(__name__)

KMEANS_MAX_ITERATIONS = 100
OBJECTIVE_TOLERANCE = 1e-9


def objective_value(
    assoc: Association, schedule: Schedule, trajectories: list[Trajectory], scenario: Scenario
) -> Objective:
    """Network objective (sum over served slots / (N * |U|)) plus the served-slot mean."""
    if len(trajectories) != assoc.n_drones or len(schedule.blocks) != assoc.n_drones:
        raise StructuralError("Association, schedule and trajectories disagree on the fleet size.")
    n_aois = scenario.n_aois
    if n_aois == 0:
        return Objective(mean_pathloss=0.0, served_mean=0.0, total=0.0, n_samples=0)
    table = pathloss_table(scenario, trajectories)
    serving = schedule.serving
    drones, slots = np.nonzero(serving != IDLE)
    samples = table[drones, slots, serving[drones, slots]]
    total = math.fsum(samples.tolist())
    n_samples = int(samples.size)
    return Objective(
        mean_pathloss=total / (scenario.n_slots * n_aois),
        served_mean=total / n_samples if n_samples else 0.0,
        total=total,
        n_samples=n_samples,
    )


def _excess_pathloss(points: np.ndarray, center: np.ndarray, scenario: Scenario, h0: float) -> np.ndarray:
    r = np.hypot(points[:, 0] - center[0], points[:, 1] - center[1])
    env = scenario.d2u_env
    return d2u_pathloss(r, h0, env) - d2u_pathloss(0.0, h0, env)


def _kmeans_pp_seed(aois: np.ndarray, k: int, scenario: Scenario, h0: float, rng: np.random.Generator) -> np.ndarray:
    centers = [aois[int(rng.integers(len(aois)))]]
    while len(centers) < k:
        distance = np.min([_excess_pathloss(aois, c, scenario, h0) for c in centers], axis=0)
        weights = distance**2
        if weights.sum() <= 0.0:
            centers.append(aois[int(rng.integers(len(aois)))])
            continue
        centers.append(aois[int(rng.choice(len(aois), p=weights / weights.sum()))])
    return np.array(centers, dtype=float)


def _lloyd(aois: np.ndarray, centers: np.ndarray, scenario: Scenario, h0: float) -> tuple[np.ndarray, np.ndarray, float]:
    labels = np.full(len(aois), -1)
    for _ in range(KMEANS_MAX_ITERATIONS):
        # Pathloss grows with horizontal range, so the nearest center is the cheapest one.
        gaps = np.linalg.norm(aois[:, None, :] - centers[None, :, :], axis=2)
        new_labels = np.argmin(gaps, axis=1)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for cluster in range(len(centers)):
            members = aois[labels == cluster]
            if len(members):
                centers[cluster] = members.mean(axis=0)
    inertia = math.fsum(
        float(_excess_pathloss(aois[labels == c], centers[c], scenario, h0).sum())
        for c in range(len(centers))
    )
    return centers, labels, inertia


def _refine_center(members: np.ndarray, start: np.ndarray, scenario: Scenario, h0: float) -> np.ndarray:
    result = minimize(
        lambda c: float(_excess_pathloss(members, c, scenario, h0).sum()),
        start,
        method="Nelder-Mead",
        options={"xatol": 1e-3, "fatol": 1e-9},
    )
    center = result.x if result.fun <= _excess_pathloss(members, start, scenario, h0).sum() else start
    norm = math.hypot(*center)
    return center * (scenario.r_bs / norm) if norm > scenario.r_bs else center


def _surplus_centers(scenario: Scenario, taken: np.ndarray, count: int) -> list[np.ndarray]:
    """Farthest-point picks among grid cells for drones left without AoIs."""
    cells = grid_cell_centers(scenario.r_bs, scenario.grid_len)
    anchors = [np.asarray(p, dtype=float) for p in taken]
    picked: list[np.ndarray] = []
    for _ in range(count):
        if anchors:
            gaps = np.min([np.linalg.norm(cells - a, axis=1) for a in anchors], axis=0)
            cell = cells[int(np.argmax(gaps))]
        else:
            cell = cells[int(np.argmin(np.linalg.norm(cells, axis=1)))]
        picked.append(cell.copy())
        anchors.append(cell)
    return picked


def kmeans_centers(scenario: Scenario, config: PlannerConfig) -> np.ndarray:
    """k-means++ centers with the D2U pathloss at the initial height as distance."""
    aois = scenario.aoi_array
    k = scenario.n_drones
    h0 = config.init_height
    if k >= len(aois):
        centers = [aoi.copy() for aoi in aois]
        centers.extend(_surplus_centers(scenario, aois, k - len(aois)))
        return np.array(centers, dtype=float).reshape(k, 2)

    rng = np.random.default_rng(config.seed)
    best: tuple[np.ndarray, np.ndarray, float] | None = None
    for _ in range(config.kmeans_restarts):
        seeded = _kmeans_pp_seed(aois, k, scenario, h0, rng)
        centers, labels, inertia = _lloyd(aois, seeded, scenario, h0)
        if best is None or inertia < best[2] - OBJECTIVE_TOLERANCE:
            best = (centers, labels, inertia)
    centers, labels, _ = best
    return np.array(
        [
            _refine_center(aois[labels == c], centers[c], scenario, h0) if np.any(labels == c) else centers[c]
            for c in range(k)
        ]
    )


def uniform_centers(scenario: Scenario, config: PlannerConfig) -> np.ndarray:
    rng = np.random.default_rng(config.seed)
    radius = scenario.r_bs * np.sqrt(rng.uniform(size=scenario.n_drones))
    angle = rng.uniform(0.0, 2.0 * math.pi, size=scenario.n_drones)
    return np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])


def _circle(center: np.ndarray, radius: float, n_slots: int) -> np.ndarray:
    phase = 2.0 * math.pi * np.arange(n_slots) / n_slots
    return center + radius * np.column_stack([np.cos(phase), np.sin(phase)])


def initial_trajectories(scenario: Scenario, config: PlannerConfig) -> list[Trajectory]:
    if config.init_mode.startswith("kmeans"):
        centers = kmeans_centers(scenario, config)
    else:
        centers = uniform_centers(scenario, config)
    radius = config.init_radius if config.init_mode.endswith("circle") else 0.0
    if 2.0 * math.pi * radius / scenario.n_slots > scenario.v_max:
        raise InfeasibleError(
            f"An initial circle of radius {radius} m is too fast for v_max={scenario.v_max}.",
            constraint="speed",
        )

    trajectories = []
    for drone, center in enumerate(centers):
        points = _circle(center, radius, scenario.n_slots)
        bounds = [height_bounds(scenario, horizontal_range(p)) for p in points]
        if any(b.empty for b in bounds):
            raise InfeasibleError(
                f"Initial path of drone {drone} leaves the backhaul working zone.", constraint="d2b"
            )
        lower = max(b.lower for b in bounds)
        upper = min(b.upper for b in bounds)
        if lower > upper:
            raise InfeasibleError(
                f"No common flying height fits the initial path of drone {drone}.", constraint="d2b"
            )
        height = min(max(config.init_height, lower), upper)
        waypoints = np.column_stack([points, np.full(scenario.n_slots, height)])
        trajectories.append(Trajectory(drone_id=drone, waypoints=waypoints))
    return trajectories


def schedule_start_slots(trajectories: list[Trajectory], z_min: float) -> list[int]:
    """Greedy cyclic start offsets; the first drone's offset restarts on failure."""
    if not trajectories:
        return []
    n = trajectories[0].n_slots
    if any(traj.n_slots != n for traj in trajectories):
        raise StructuralError("All trajectories must share the same slot count.")
    # rotations[d][s, t] = W_d[(t + s) mod N]
    index = (np.arange(n)[None, :] + np.arange(n)[:, None]) % n
    rotations = [traj.waypoints[index] for traj in trajectories]

    for first in range(n):
        offsets = [first]
        placed = [rotations[0][first]]
        for drone in range(1, len(trajectories)):
            gaps = np.min(
                [np.linalg.norm(rotations[drone] - other[None, :, :], axis=2).min(axis=1) for other in placed],
                axis=0,
            )
            feasible = np.flatnonzero(gaps >= z_min)
            if feasible.size == 0:
                break
            offsets.append(int(feasible[0]))
            placed.append(rotations[drone][int(feasible[0])])
        if len(offsets) == len(trajectories):
            logger.info("start_slots_scheduled", offsets=offsets, first_offset=first)
            return offsets
        logger.debug("start_slot_restart", first_offset=first, failed_drone=len(offsets))
    raise SeparationInfeasibleError(
        f"No start offsets keep all {len(trajectories)} drones {z_min} m apart."
    )


class PlannerService:
    """Block coordinate descent over association, schedule and 3D trajectories."""

    def __init__(self, config: PlannerConfig | None = None, settings: Settings | None = None) -> None:
        self._config = config or PlannerConfig()
        self._settings = settings or get_settings()

    def plan(self, scenario: Scenario) -> PlanSolution:
        started = time.perf_counter()
        config = self._config
        trajectories = initial_trajectories(scenario, config)
        assoc = optimize_association(scenario, trajectories)
        schedule = optimize_schedule(scenario, trajectories, assoc)
        objective = objective_value(assoc, schedule, trajectories, scenario).mean_pathloss

        objective_log: list[float] = []
        delta_w_log: list[float] = []
        converged = False
        for iteration in range(1, config.max_iterations + 1):
            serving = schedule.serving
            updated = [sweep_update(traj, serving[d], scenario) for d, traj in enumerate(trajectories)]
            delta_w = max(
                float(np.linalg.norm(new.waypoints - old.waypoints, axis=1).max())
                for new, old in zip(updated, trajectories)
            )
            trajectories = updated
            self._check_monotone(objective, objective_value(assoc, schedule, trajectories, scenario).mean_pathloss, "trajectory")

            assoc, schedule, new_objective = self._update_blocks(scenario, trajectories, assoc, schedule)
            self._check_monotone(objective, new_objective, "association")
            objective = new_objective
            objective_log.append(objective)
            delta_w_log.append(delta_w)
            logger.debug("bcd_iteration", iteration=iteration, objective=objective, delta_w=delta_w)
            if delta_w <= config.epsilon_w:
                converged = True
                break

        if converged:
            logger.info("bcd_converged", iterations=len(objective_log), objective=objective)
        else:
            logger.warning("bcd_not_converged", iterations=len(objective_log), objective=objective)

        fleet_plan = FleetPlan(
            trajectories=trajectories,
            start_slots=schedule_start_slots(trajectories, scenario.z_min),
        )
        final = objective_value(assoc, schedule, trajectories, scenario)
        solution = PlanSolution(
            association=assoc,
            schedule=schedule,
            fleet_plan=fleet_plan,
            objective=final.mean_pathloss,
            served_mean=final.served_mean,
            objective_log=objective_log,
            delta_w_log=delta_w_log,
            converged=converged,
            runtime_s=time.perf_counter() - started,
        )
        validate_solution(solution, scenario)
        return solution

    def _update_blocks(
        self,
        scenario: Scenario,
        trajectories: list[Trajectory],
        assoc: Association,
        schedule: Schedule,
    ) -> tuple[Association, Schedule, float]:
        current = objective_value(assoc, schedule, trajectories, scenario).mean_pathloss
        new_assoc = optimize_association(scenario, trajectories)
        new_schedule = optimize_schedule(scenario, trajectories, new_assoc)
        candidate = objective_value(new_assoc, new_schedule, trajectories, scenario).mean_pathloss
        if candidate <= current + OBJECTIVE_TOLERANCE:
            return new_assoc, new_schedule, candidate
        # The trajectory-mean association cost ignores the schedule; keep A and re-solve K.
        kept_schedule = optimize_schedule(scenario, trajectories, assoc)
        kept = objective_value(assoc, kept_schedule, trajectories, scenario).mean_pathloss
        if kept <= current:
            return assoc, kept_schedule, kept
        return assoc, schedule, current

    def _check_monotone(self, before: float, after: float, block: str) -> None:
        if self._settings.planner_debug and after > before + OBJECTIVE_TOLERANCE:
            raise PlanValidationError(
                f"Objective rose from {before} to {after} after the {block} update.",
                violations=[f"monotonicity: {block}"],
            )


def validate_solution(solution: PlanSolution | StaticDeployment, scenario: Scenario) -> None:
    """Raise PlanValidationError unless every constraint of the plan holds."""
    violations: list[str] = []
    for traj in solution.trajectories:
        violations.extend(validate_trajectory(traj, scenario))
    violations.extend(validate_schedule(solution.schedule, solution.association, scenario))
    separation = validate_separation(solution.fleet_plan, scenario)
    if separation < scenario.z_min:
        violations.append(f"separation: drones come within {separation:.6f} m (z_min {scenario.z_min})")
    if violations:
        raise PlanValidationError(
            f"Plan violates {len(violations)} constraint(s); first: {violations[0]}",
            violations=violations,
        )


def plan(scenario: Scenario, config: PlannerConfig | None = None) -> PlanSolution:
    return PlannerService(config=config).plan(scenario)
