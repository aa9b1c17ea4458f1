from __future__ import annotations

import numpy as np

from app.models.metrics import Metrics
from app.models.plan import IDLE, PlanSolution, StaticDeployment
from app.models.scenario import Scenario
from app.services.association_service import pathloss_table
from app.services.planner_service import objective_value
from app.services.scenario_service import validate_separation


def served_samples(solution: PlanSolution | StaticDeployment, scenario: Scenario) -> np.ndarray:
    """Pathloss of every (drone, slot) pair that serves an AoI."""
    if scenario.n_aois == 0:
        return np.zeros(0)
    table = pathloss_table(scenario, solution.trajectories)
    serving = solution.schedule.serving
    drones, slots = np.nonzero(serving != IDLE)
    return table[drones, slots, serving[drones, slots]]


def summarize_samples(samples: np.ndarray) -> tuple[float, float, float, list[tuple[float, float]]]:
    """Mean, population std, max and the empirical CDF over distinct values."""
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        return 0.0, 0.0, 0.0, []
    values, counts = np.unique(samples, return_counts=True)
    cumulative = np.cumsum(counts) / samples.size
    cumulative[-1] = 1.0
    cdf = [(float(v), float(c)) for v, c in zip(values, cumulative)]
    return float(samples.mean()), float(samples.std()), float(samples.max()), cdf


def aoi_means(solution: PlanSolution | StaticDeployment, scenario: Scenario) -> np.ndarray:
    """Mean served pathloss of every AoI over the slots its drone serves it.

    Each AoI has one drone, so these are the per drone-AoI pair averages whose
    spread measures fairness between AoIs.
    """
    if scenario.n_aois == 0:
        return np.zeros(0)
    table = pathloss_table(scenario, solution.trajectories)
    serving = solution.schedule.serving
    means = []
    for aoi, drone in enumerate(solution.association.owner):
        slots = np.flatnonzero(serving[drone] == aoi)
        if slots.size:
            means.append(float(table[drone, slots, aoi].mean()))
    return np.array(means)


def hovering_by_drone(solution: PlanSolution | StaticDeployment, scenario: Scenario) -> list[float]:
    """Per-drone share of served slots spent within half a grid cell of the served AoI."""
    serving = solution.schedule.serving
    fractions = []
    for drone, traj in enumerate(solution.trajectories):
        slots = np.flatnonzero(serving[drone] != IDLE)
        if slots.size == 0:
            fractions.append(0.0)
            continue
        targets = scenario.aoi_array[serving[drone, slots]]
        gaps = np.hypot(*(traj.horizontal[slots] - targets).T)
        fractions.append(float(np.mean(gaps <= scenario.grid_len / 2.0)))
    return fractions


def compute_metrics(solution: PlanSolution | StaticDeployment, scenario: Scenario) -> Metrics:
    mean, std, peak, cdf = summarize_samples(served_samples(solution, scenario))
    pairs = aoi_means(solution, scenario)
    by_drone = hovering_by_drone(solution, scenario)
    objective = objective_value(solution.association, solution.schedule, solution.trajectories, scenario)
    active = [f for drone, f in enumerate(by_drone) if solution.association.aois_of(drone)]
    return Metrics(
        mean_pathloss=objective.mean_pathloss,
        served_mean=mean,
        served_std=std,
        served_max=peak,
        pair_std=float(pairs.std()) if pairs.size else 0.0,
        cdf=cdf,
        min_separation=validate_separation(solution.fleet_plan, scenario),
        hovering_fraction=float(np.mean(active)) if active else 0.0,
        hovering_by_drone=by_drone,
        runtime=solution.runtime_s,
        iterations=solution.iterations,
        converged=solution.converged,
    )
