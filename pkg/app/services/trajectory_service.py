"""Per-slot coordinate updates of one drone trajectory.

Slots are visited in ascending order; each visit moves the waypoint towards
its scheduled AoI inside the speed and backhaul disks and then picks the
best flying height for the new horizontal distance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from app.core.channel import d2b_feasible_horizontal_radius, d2u_pathloss, optimal_elevation_angle
from app.core.exceptions import InfeasibleError
from app.core.geometry import GEOMETRY_TOLERANCE, disk_violation, horizontal_range, project_onto_disk
from app.models.channel import D2BEnvParams, HeightInterval
from app.models.plan import IDLE
from app.models.scenario import Scenario, Trajectory
from app.services.scenario_service import height_bounds

PROJECTION_MAX_CYCLES = 200
PROJECTION_TOLERANCE = 1e-6
POLISH_STEPS = 60
ORIGIN = np.zeros(2)


@dataclass(frozen=True)
class SlotContext:
    prev: np.ndarray
    next: np.ndarray
    target: np.ndarray
    height: float
    v_max: float
    d2b_env: D2BEnvParams
    current: np.ndarray
    r_cap: float

    def disks(self) -> list[tuple[np.ndarray, float]]:
        d2b_radius = d2b_feasible_horizontal_radius(self.height, self.d2b_env, self.r_cap)
        return [
            (np.asarray(self.prev, dtype=float), self.v_max),
            (np.asarray(self.next, dtype=float), self.v_max),
            (ORIGIN, d2b_radius),
        ]


def _dykstra(start: np.ndarray, disks: list[tuple[np.ndarray, float]]) -> np.ndarray:
    x = start.copy()
    increments = [np.zeros(2) for _ in disks]
    for _ in range(PROJECTION_MAX_CYCLES):
        change = 0.0
        for i, (center, radius) in enumerate(disks):
            y = project_onto_disk(x + increments[i], center, radius)
            increment = x + increments[i] - y
            change = max(change, float(np.linalg.norm(y - x)), float(np.linalg.norm(increment - increments[i])))
            increments[i] = increment
            x = y
        if change <= PROJECTION_TOLERANCE:
            break
    return x


def _polish(anchor: np.ndarray, point: np.ndarray, disks: list[tuple[np.ndarray, float]]) -> np.ndarray:
    """Furthest point on the segment anchor -> point lying inside every disk (anchor inside)."""
    lo, hi = 0.0, 1.0
    for _ in range(POLISH_STEPS):
        mid = 0.5 * (lo + hi)
        if disk_violation(anchor + mid * (point - anchor), disks) <= 0.0:
            lo = mid
        else:
            hi = mid
    return anchor + lo * (point - anchor)


def optimize_slot_position(ctx: SlotContext) -> np.ndarray:
    """Closest point to the target inside the speed and backhaul disks.

    Returned points lie inside every disk with no tolerance, so repeated sweeps
    never widen the gap between neighbouring waypoints.
    """
    prev = np.asarray(ctx.prev, dtype=float)
    nxt = np.asarray(ctx.next, dtype=float)
    current = np.asarray(ctx.current, dtype=float)
    gap = float(np.linalg.norm(prev - nxt))
    if gap > 2.0 * ctx.v_max + GEOMETRY_TOLERANCE:
        raise InfeasibleError(
            f"Neighbouring waypoints are {gap:.3f} m apart, "
            f"beyond two slots of travel at {ctx.v_max} m/slot.",
            constraint="speed",
        )
    if gap > 2.0 * ctx.v_max:
        return current.copy()
    target = np.asarray(ctx.target, dtype=float)
    disks = ctx.disks()
    if disk_violation(target, disks) <= 0.0:
        return target.copy()

    point = _dykstra(target, disks)
    current_inside = disk_violation(current, disks) <= 0.0
    if disk_violation(point, disks) > 0.0:
        if not current_inside:
            return current.copy()
        point = _polish(current, point, disks)
    if np.linalg.norm(point - target) > np.linalg.norm(current - target):
        return current.copy()
    return point


def optimize_slot_height(r_du: float, bounds: HeightInterval, theta_opt: float) -> float:
    if bounds.empty:
        raise InfeasibleError("No flying height satisfies the height constraints.", constraint="d2b")
    if r_du <= 0.0:
        return bounds.lower
    return min(max(r_du * math.tan(math.radians(theta_opt)), bounds.lower), bounds.upper)


def _climb_window(prev_h: float, next_h: float, h_max_rate: float) -> tuple[float, float]:
    return max(prev_h, next_h) - h_max_rate, min(prev_h, next_h) + h_max_rate


def _slot_pathloss(point: np.ndarray, height: float, target: np.ndarray, scenario: Scenario) -> float:
    r = float(np.hypot(*(point - target)))
    return float(d2u_pathloss(r, height, scenario.d2u_env))


def sweep_update(trajectory: Trajectory, serving_row: np.ndarray, scenario: Scenario) -> Trajectory:
    """One ascending pass over the slots; neighbours come from the partially updated path."""
    waypoints = trajectory.waypoints.copy()
    n = trajectory.n_slots
    theta_opt = optimal_elevation_angle(scenario.d2u_env)
    aois = scenario.aoi_array
    for slot in range(n):
        aoi = int(serving_row[slot])
        if aoi == IDLE:
            continue
        prev, nxt = waypoints[(slot - 1) % n], waypoints[(slot + 1) % n]
        current = waypoints[slot].copy()
        target = aois[aoi]
        ctx = SlotContext(
            prev=prev[:2],
            next=nxt[:2],
            target=target,
            height=float(current[2]),
            v_max=scenario.v_max,
            d2b_env=scenario.d2b_env,
            current=current[:2],
            r_cap=scenario.r_bs,
        )
        lo, hi = _climb_window(float(prev[2]), float(nxt[2]), scenario.h_max_rate)

        def place(point: np.ndarray) -> tuple[np.ndarray, float] | None:
            bounds = height_bounds(scenario, horizontal_range(point)).intersect(lo, hi)
            if bounds.empty:
                return None
            r_du = float(np.hypot(*(point - target)))
            return point, optimize_slot_height(r_du, bounds, theta_opt)

        old_loss = _slot_pathloss(current[:2], float(current[2]), target, scenario)
        candidate = place(optimize_slot_position(ctx))
        if candidate is None or _slot_pathloss(*candidate, target, scenario) > old_loss:
            # Current waypoint is valid, so its own height band is never empty.
            candidate = place(current[:2]) or (current[:2], float(current[2]))
            if _slot_pathloss(*candidate, target, scenario) > old_loss:
                candidate = (current[:2], float(current[2]))
        point, height = candidate
        waypoints[slot] = (point[0], point[1], height)
    return Trajectory(drone_id=trajectory.drone_id, waypoints=waypoints)
