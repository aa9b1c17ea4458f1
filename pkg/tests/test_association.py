import itertools
import math

import numpy as np
import pytest

from app.core.exceptions import InfeasibleError, StructuralError
from app.models.plan import IDLE, Association, Block, Schedule
from app.models.scenario import Scenario, Trajectory
from app.services.association_service import (
    association_cost,
    blocks_for,
    length_orders,
    optimize_association,
    optimize_drone_schedule,
    optimize_schedule,
    pathloss_table,
    schedule_cost,
    validate_schedule,
)


def _hovering(scenario: Scenario, points: list[tuple[float, float, float]]) -> list[Trajectory]:
    return [Trajectory.hover(d, np.array(p), scenario.n_slots) for d, p in enumerate(points)]


def _serving_row(blocks: list[Block], n_slots: int) -> np.ndarray:
    return Schedule(blocks=[blocks], n_slots=n_slots).serving[0]


def _schedule_oracle(table: np.ndarray, aois: list[int], n_slots: int) -> float:
    best = math.inf
    for lengths in set(itertools.permutations(blocks_for(n_slots, len(aois)))):
        for shift in range(n_slots):
            for order in itertools.permutations(aois):
                blocks, cursor = [], shift
                for aoi, length in zip(order, lengths):
                    blocks.append(Block(aoi=aoi, start=cursor % n_slots, length=length))
                    cursor += length
                best = min(best, schedule_cost(_serving_row(blocks, n_slots), table))
    return best


def test_blocks_are_uniform() -> None:
    assert blocks_for(12, 4) == [3, 3, 3, 3]
    assert blocks_for(12, 5) == [3, 3, 2, 2, 2]
    assert blocks_for(60, 7) == [9, 9, 9, 9, 8, 8, 8]


def test_pathloss_table_shape(small_template: Scenario) -> None:
    scenario = small_template.replace(aois=((0.0, 0.0), (100.0, 0.0), (0.0, 300.0)), n_drones=2)
    table = pathloss_table(scenario, _hovering(scenario, [(0, 0, 50), (100, 0, 50)]))
    assert table.shape == (2, 12, 3)
    assert table[0, 0, 0] < table[0, 0, 1] < table[0, 0, 2]


def test_association_sends_each_aoi_to_the_nearest_drone(small_template: Scenario) -> None:
    scenario = small_template.replace(
        aois=((10.0, 0.0), (390.0, 0.0), (380.0, 0.0), (20.0, 0.0)), n_drones=2
    )
    trajectories = _hovering(scenario, [(0, 0, 50), (400, 0, 50)])
    assoc = optimize_association(scenario, trajectories)
    assert assoc.owner == (0, 1, 1, 0)
    assert assoc.counts() == [2, 2]
    assert assoc.matrix().sum(axis=0).tolist() == [1, 1, 1, 1]
    assert association_cost(scenario, trajectories).shape == (2, 4)


def test_association_respects_the_slot_budget(small_template: Scenario) -> None:
    scenario = small_template.replace(
        aois=((10.0, 0.0), (20.0, 0.0), (30.0, 0.0), (400.0, 0.0)), n_drones=2, s_min=6
    )
    assoc = optimize_association(scenario, _hovering(scenario, [(0, 0, 50), (400, 0, 50)]))
    assert max(assoc.counts()) == 2


def test_association_beyond_capacity_is_infeasible(small_template: Scenario) -> None:
    scenario = small_template.replace(aois=((0.0, 0.0), (50.0, 0.0), (100.0, 0.0)), n_drones=1, s_min=6)
    with pytest.raises(InfeasibleError) as exc_info:
        optimize_association(scenario, _hovering(scenario, [(0, 0, 50)]))
    assert exc_info.value.constraint == "capacity"


@pytest.mark.parametrize(("n_slots", "n_aois"), [(12, 1), (12, 2), (12, 3), (12, 4), (12, 5), (14, 4), (13, 4)])
def test_drone_schedule_matches_exhaustive_search(n_slots: int, n_aois: int) -> None:
    rng = np.random.default_rng(n_slots * 10 + n_aois)
    for _ in range(5):
        table = rng.uniform(60.0, 120.0, size=(n_slots, n_aois + 1))
        aois = sorted(rng.choice(n_aois + 1, size=n_aois, replace=False).tolist())
        blocks = optimize_drone_schedule(table, aois, n_slots, s_min=2)
        got = schedule_cost(_serving_row(blocks, n_slots), table)
        assert got == pytest.approx(_schedule_oracle(table, aois, n_slots), rel=1e-9)


def test_length_orders_cover_every_interleaving() -> None:
    assert length_orders(12, 4) == [[3, 3, 3, 3]]
    orders = {tuple(order) for order in length_orders(14, 4)}
    assert (4, 3, 4, 3) in orders
    assert (4, 4, 3, 3) in orders
    assert len(orders) == 6


def test_drone_schedule_always_returns_one_block_per_aoi() -> None:
    table = np.full((12, 3), 80.0)
    blocks = optimize_drone_schedule(table, [0, 1, 2], 12, s_min=3)
    assert sorted(block.aoi for block in blocks) == [0, 1, 2]
    assert sum(block.length for block in blocks) == 12


def test_drone_schedule_below_s_min_is_structural() -> None:
    with pytest.raises(StructuralError):
        optimize_drone_schedule(np.zeros((12, 5)), [0, 1, 2, 3, 4], 12, s_min=3)


def test_schedule_prefers_the_slots_closest_to_each_aoi(small_template: Scenario) -> None:
    scenario = small_template.replace(aois=((0.0, 0.0), (600.0, 0.0)), n_drones=1, s_min=3)
    waypoints = np.array([(0.0, 0, 50)] * 6 + [(600.0, 0, 50)] * 6)
    traj = Trajectory(drone_id=0, waypoints=waypoints)
    assoc = Association(owner=(0, 0), n_drones=1)
    schedule = optimize_schedule(scenario, [traj], assoc)
    assert schedule.serving[0].tolist() == [0] * 6 + [1] * 6
    assert validate_schedule(schedule, assoc, scenario) == []


def test_idle_drone_has_no_blocks(small_template: Scenario) -> None:
    scenario = small_template.replace(aois=((0.0, 0.0),), n_drones=2)
    assoc = Association(owner=(0,), n_drones=2)
    schedule = optimize_schedule(scenario, _hovering(scenario, [(0, 0, 50), (300, 0, 50)]), assoc)
    assert schedule.blocks[1] == []
    assert np.all(schedule.serving[1] == IDLE)
    assert validate_schedule(schedule, assoc, scenario) == []


def test_schedule_matrix_marks_one_aoi_per_served_slot(small_template: Scenario) -> None:
    schedule = Schedule(blocks=[[Block(aoi=1, start=10, length=6), Block(aoi=0, start=4, length=6)]], n_slots=12)
    k = schedule.matrix(2)
    assert k.shape == (1, 2, 12)
    assert k.sum(axis=1).tolist() == [[1] * 12]
    assert k[0, 1, [10, 11, 0, 1, 2, 3]].tolist() == [1] * 6


def test_validation_reports_broken_schedules(small_template: Scenario) -> None:
    assoc = Association(owner=(0, 0), n_drones=1)
    uneven = Schedule(blocks=[[Block(aoi=0, start=0, length=10), Block(aoi=1, start=10, length=2)]], n_slots=12)
    kinds = {v.split(":")[0] for v in validate_schedule(uneven, assoc, small_template)}
    assert kinds == {"uniformity", "s_min"}

    missing = Schedule(blocks=[[Block(aoi=0, start=0, length=12)]], n_slots=12)
    kinds = {v.split(":")[0] for v in validate_schedule(missing, assoc, small_template)}
    assert "association" in kinds

    overlapping = Schedule(blocks=[[Block(aoi=0, start=0, length=6), Block(aoi=1, start=3, length=6)]], n_slots=12)
    kinds = {v.split(":")[0] for v in validate_schedule(overlapping, assoc, small_template)}
    assert {"coverage", "contiguity"} <= kinds
