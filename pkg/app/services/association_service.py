from __future__ import annotations

import itertools
import math
from collections import Counter

import numpy as np

from app.core.assignment import capacity_assignment, min_cost_assignment
from app.core.channel import d2u_pathloss
from app.core.exceptions import InfeasibleError, StructuralError
from app.models.plan import IDLE, Association, Block, Schedule
from app.models.scenario import Scenario, Trajectory


def pathloss_table(scenario: Scenario, trajectories: list[Trajectory]) -> np.ndarray:
    """(D, N, U) D2U pathloss from every waypoint to every AoI."""
    if scenario.n_aois == 0:
        return np.zeros((len(trajectories), scenario.n_slots, 0))
    aois = scenario.aoi_array
    tables = []
    for traj in trajectories:
        offsets = traj.horizontal[:, None, :] - aois[None, :, :]
        r = np.hypot(offsets[..., 0], offsets[..., 1])
        tables.append(d2u_pathloss(r, traj.heights[:, None], scenario.d2u_env))
    return np.stack(tables)


def association_cost(scenario: Scenario, trajectories: list[Trajectory]) -> np.ndarray:
    """c[d, u]: mean pathloss of drone d's whole trajectory towards AoI u."""
    return pathloss_table(scenario, trajectories).mean(axis=1)


def optimize_association(scenario: Scenario, trajectories: list[Trajectory]) -> Association:
    cap = scenario.aoi_capacity
    n_drones = len(trajectories)
    if cap * n_drones < scenario.n_aois:
        raise InfeasibleError(
            f"{n_drones} drones x {cap} AoIs each cannot cover {scenario.n_aois} AoIs "
            f"(capacity {scenario.capacity}, floor(N/S_min) {scenario.n_slots // scenario.s_min}).",
            constraint="capacity",
        )
    result = capacity_assignment(association_cost(scenario, trajectories), cap)
    return Association(owner=result.owner, n_drones=n_drones)


def blocks_for(n_slots: int, n_aois: int) -> list[int]:
    base, remainder = divmod(n_slots, n_aois)
    return [base + 1] * remainder + [base] * (n_aois - remainder)


def schedule_cost(serving_row: np.ndarray, table: np.ndarray) -> float:
    """Summed pathloss of one drone's served slots; table is (N, U)."""
    return math.fsum(
        float(table[slot, aoi]) for slot, aoi in enumerate(serving_row) if aoi != IDLE
    )


def _block_starts(start: int, lengths: list[int], n_slots: int) -> list[int]:
    starts, cursor = [], start
    for length in lengths:
        starts.append(cursor % n_slots)
        cursor += length
    return starts


def length_orders(n_slots: int, n_aois: int) -> list[list[int]]:
    """Every distinct arrangement of the uniform block lengths around the period."""
    base, remainder = divmod(n_slots, n_aois)
    orders = []
    for longs in itertools.combinations(range(n_aois), remainder):
        orders.append([base + 1 if i in longs else base for i in range(n_aois)])
    return orders


def optimize_drone_schedule(
    table: np.ndarray, aois: list[int], n_slots: int, s_min: int
) -> list[Block]:
    """Best contiguous cyclic block schedule for one drone; table is (N, U).

    Searches every start shift of every length order, so the result is exact.
    """
    if not aois:
        return []
    lengths = blocks_for(n_slots, len(aois))
    if min(lengths) < s_min:
        raise StructuralError(
            f"{len(aois)} AoIs leave blocks of {min(lengths)} slots, below S_min={s_min}.",
            constraint="s_min",
        )
    sub = table[:, aois]
    # Cyclic prefix sums over two periods give any wrapped block sum.
    prefix = np.vstack([np.zeros((1, len(aois))), np.cumsum(np.vstack([sub, sub]), axis=0)])

    best_blocks: list[Block] = []
    best_cost = math.inf
    seen: set[tuple[tuple[int, int], ...]] = set()
    for order in length_orders(n_slots, len(aois)):
        for shift in range(n_slots):
            starts = _block_starts(shift, order, n_slots)
            key = tuple(sorted(zip(starts, order)))
            if key in seen:
                continue
            seen.add(key)
            block_cost = np.array(
                [prefix[start + length] - prefix[start] for start, length in zip(starts, order)]
            )
            matching = min_cost_assignment(block_cost)
            if not best_blocks or matching.cost < best_cost - 1e-9 * max(1.0, abs(best_cost)):
                best_cost = matching.cost
                best_blocks = [
                    Block(aoi=aois[col], start=start, length=length)
                    for start, length, col in zip(starts, order, matching.columns)
                ]
    return best_blocks


def optimize_schedule(
    scenario: Scenario, trajectories: list[Trajectory], assoc: Association
) -> Schedule:
    table = pathloss_table(scenario, trajectories)
    blocks = [
        optimize_drone_schedule(table[drone], assoc.aois_of(drone), scenario.n_slots, scenario.s_min)
        for drone in range(len(trajectories))
    ]
    return Schedule(blocks=blocks, n_slots=scenario.n_slots)


def validate_schedule(schedule: Schedule, assoc: Association, scenario: Scenario) -> list[str]:
    violations: list[str] = []
    n = scenario.n_slots
    serving = schedule.serving
    for drone, drone_blocks in enumerate(schedule.blocks):
        aois = assoc.aois_of(drone)
        if sorted(block.aoi for block in drone_blocks) != aois:
            violations.append(f"association: drone {drone} blocks do not match its AoIs {aois}")
        if not aois:
            continue
        covered = Counter(slot for block in drone_blocks for slot in block.slots(n))
        if len(covered) != n or any(count != 1 for count in covered.values()):
            violations.append(f"coverage: drone {drone} does not serve exactly one AoI per slot")
        expected = sorted(blocks_for(n, len(aois)))
        if sorted(block.length for block in drone_blocks) != expected:
            violations.append(f"uniformity: drone {drone} block lengths differ from {expected}")
        for block in drone_blocks:
            if block.length < scenario.s_min:
                violations.append(
                    f"s_min: drone {drone} serves AoI {block.aoi} for {block.length} slots"
                )
            if any(serving[drone, slot] != block.aoi for slot in block.slots(n)):
                violations.append(f"contiguity: drone {drone} block for AoI {block.aoi} is split")
    return violations
