from __future__ import annotations

import itertools
import math

import numpy as np

from app.core.channel import d2b_feasible_height_interval
from app.core.exceptions import InfeasibleError, StructuralError
from app.core.geometry import GEOMETRY_TOLERANCE, MIN_RANGE, horizontal_range
from app.models.channel import HeightInterval
from app.models.scenario import FleetPlan, Scenario, Trajectory


def default_scenario_template() -> Scenario:
    """Suburban scenario: 900 m coverage, 20 m grid, 60 slots of ~10 s."""
    return Scenario(
        r_bs=900.0,
        grid_len=20.0,
        n_drones=5,
        n_slots=60,
        v_max=90.0,
        h_max_rate=10.0,
        z_min=200.0,
        s_min=10,
        capacity=6,
    )


def grid_cell_centers(r_bs: float, grid_len: float) -> np.ndarray:
    half = math.ceil(r_bs / grid_len)
    coords = (np.arange(-half, half) + 0.5) * grid_len
    xs, ys = np.meshgrid(coords, coords, indexing="ij")
    centers = np.column_stack([xs.ravel(), ys.ravel()])
    return centers[np.hypot(centers[:, 0], centers[:, 1]) <= r_bs]


def generate_scenario(
    seed: int,
    n_aois: int,
    n_drones: int,
    template: Scenario | None = None,
) -> Scenario:
    template = template or default_scenario_template()
    cells = grid_cell_centers(template.r_bs, template.grid_len)
    if n_aois > len(cells):
        raise InfeasibleError(
            f"Requested {n_aois} AoIs but the coverage disk only has {len(cells)} grid cells.",
            constraint="capacity",
        )
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(cells), size=n_aois, replace=False) if n_aois else []
    aois = tuple((float(cells[i, 0]), float(cells[i, 1])) for i in chosen)
    return template.replace(aois=aois, n_drones=n_drones, seed=seed)


def height_bounds(scenario: Scenario, r_db: float) -> HeightInterval:
    """D2B working-zone heights at range r_db, clipped to the flying altitude band."""
    interval = d2b_feasible_height_interval(
        max(r_db, MIN_RANGE), scenario.d2b_env, h_ceiling=scenario.h_ceiling
    )
    return interval.intersect(scenario.h_min, scenario.h_ceiling)


class HeightProfile:
    """Tabulated height bounds over the coverage disk for vectorized clamping.

    Bounds between grid radii are taken conservatively from both neighbours.
    """

    def __init__(self, scenario: Scenario, step: float = 1.0) -> None:
        self._step = step
        self.radii = np.arange(0.0, scenario.r_bs + 2 * step, step)
        lower = np.empty_like(self.radii)
        upper = np.empty_like(self.radii)
        for i, r in enumerate(self.radii):
            bounds = height_bounds(scenario, float(r))
            if bounds.empty:
                lower[i], upper[i] = np.inf, -np.inf
            else:
                lower[i], upper[i] = bounds.lower, bounds.upper
        self.lower = np.maximum(lower, np.roll(lower, -1))
        self.upper = np.minimum(upper, np.roll(upper, -1))
        self.lower[-1], self.upper[-1] = lower[-1], upper[-1]

    def clamp(self, r: np.ndarray, h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Clamped heights and a mask of ranges whose band is non-empty."""
        idx = np.clip((np.asarray(r) / self._step).astype(int), 0, len(self.radii) - 1)
        lo, hi = self.lower[idx], self.upper[idx]
        valid = lo <= hi
        return np.clip(h, np.where(valid, lo, 0.0), np.where(valid, hi, 0.0)), valid


def validate_trajectory(trajectory: Trajectory, scenario: Scenario) -> list[str]:
    if trajectory.n_slots != scenario.n_slots:
        raise StructuralError(
            f"Trajectory {trajectory.drone_id} has {trajectory.n_slots} waypoints, "
            f"expected {scenario.n_slots}."
        )
    violations: list[str] = []
    w = trajectory.waypoints
    n = trajectory.n_slots
    for slot in range(n):
        nxt = (slot + 1) % n
        step = math.hypot(w[nxt, 0] - w[slot, 0], w[nxt, 1] - w[slot, 1])
        if step > scenario.v_max + GEOMETRY_TOLERANCE:
            kind = "closure" if nxt == 0 else "speed"
            violations.append(
                f"{kind}: drone {trajectory.drone_id} moves {step:.6f} m between slots "
                f"{slot} and {nxt} (v_max {scenario.v_max})"
            )
        climb = abs(w[nxt, 2] - w[slot, 2])
        if climb > scenario.h_max_rate + GEOMETRY_TOLERANCE:
            violations.append(
                f"climb: drone {trajectory.drone_id} changes height by {climb:.6f} m between "
                f"slots {slot} and {nxt} (h_max_rate {scenario.h_max_rate})"
            )
        bounds = height_bounds(scenario, horizontal_range(w[slot]))
        if not bounds.contains(float(w[slot, 2]), tol=GEOMETRY_TOLERANCE):
            violations.append(
                f"d2b: drone {trajectory.drone_id} slot {slot} at height {w[slot, 2]:.6f} m "
                f"outside the working zone {bounds}"
            )
    return violations


def validate_separation(plan: FleetPlan, scenario: Scenario | None = None) -> float:
    """Minimum 3D inter-drone distance over all slots and pairs (inf for one drone)."""
    positions = plan.positions()
    best = math.inf
    for i, j in itertools.combinations(range(len(plan.trajectories)), 2):
        gap = np.linalg.norm(positions[i] - positions[j], axis=1).min()
        best = min(best, float(gap))
    return best
