import math
from types import SimpleNamespace

import numpy as np
import pytest

from app.core.channel import d2u_pathloss
from app.core.logging import numpy_to_native_processor
from app.models.plan import Association, Block, Schedule
from app.models.scenario import FleetPlan, Scenario, Trajectory
from app.services.metrics_service import (
    aoi_means,
    compute_metrics,
    hovering_by_drone,
    served_samples,
    summarize_samples,
)
from app.services.planner_service import plan


def test_summary_of_two_samples() -> None:
    mean, std, peak, cdf = summarize_samples(np.array([70.0, 80.0]))
    assert (mean, std, peak) == (75.0, 5.0, 80.0)
    assert cdf == [(70.0, 0.5), (80.0, 1.0)]


def test_cdf_merges_repeated_values() -> None:
    _, _, _, cdf = summarize_samples(np.array([3.0, 1.0, 3.0, 2.0]))
    assert cdf == [(1.0, 0.25), (2.0, 0.5), (3.0, 1.0)]


def test_empty_summary() -> None:
    assert summarize_samples(np.zeros(0)) == (0.0, 0.0, 0.0, [])


def test_metrics_of_a_settled_single_drone_plan(single_aoi_scenario: Scenario) -> None:
    solution = plan(single_aoi_scenario)
    metrics = compute_metrics(solution, single_aoi_scenario)
    floor = float(d2u_pathloss(0.0, 30.0, single_aoi_scenario.d2u_env))
    assert metrics.served_mean == pytest.approx(floor)
    assert metrics.served_std == pytest.approx(0.0, abs=1e-9)
    assert metrics.mean_pathloss == pytest.approx(floor)
    assert metrics.hovering_fraction == 1.0
    assert math.isinf(metrics.min_separation)
    assert metrics.converged
    assert "runtime" not in metrics.row()
    assert len(served_samples(solution, single_aoi_scenario)) == single_aoi_scenario.n_slots


def test_idle_drones_do_not_dilute_hovering(small_template: Scenario) -> None:
    scenario = small_template.replace(aois=((0.0, 0.0),), n_drones=2)
    trajectories = [
        Trajectory.hover(0, np.array([0.0, 0.0, 30.0]), scenario.n_slots),
        Trajectory.hover(1, np.array([400.0, 0.0, 30.0]), scenario.n_slots),
    ]
    solution = SimpleNamespace(
        association=Association(owner=(0,), n_drones=2),
        schedule=Schedule(blocks=[[Block(aoi=0, start=0, length=12)], []], n_slots=12),
        trajectories=trajectories,
        fleet_plan=FleetPlan(trajectories=trajectories, start_slots=[0, 0]),
        runtime_s=0.0,
        iterations=0,
        converged=True,
    )
    assert hovering_by_drone(solution, scenario) == [1.0, 0.0]
    metrics = compute_metrics(solution, scenario)
    assert metrics.hovering_fraction == 1.0
    assert metrics.min_separation == pytest.approx(400.0)


def test_pair_spread_compares_aoi_averages(small_template: Scenario) -> None:
    scenario = small_template.replace(aois=((0.0, 0.0), (300.0, 0.0)), n_drones=1)
    trajectories = [Trajectory.hover(0, np.array([0.0, 0.0, 30.0]), scenario.n_slots)]
    solution = SimpleNamespace(
        association=Association(owner=(0, 0), n_drones=1),
        schedule=Schedule(blocks=[[Block(aoi=0, start=0, length=6), Block(aoi=1, start=6, length=6)]], n_slots=12),
        trajectories=trajectories,
        fleet_plan=FleetPlan(trajectories=trajectories, start_slots=[0]),
        runtime_s=0.0,
        iterations=0,
        converged=True,
    )
    near = float(d2u_pathloss(0.0, 30.0, scenario.d2u_env))
    far = float(d2u_pathloss(300.0, 30.0, scenario.d2u_env))
    assert aoi_means(solution, scenario).tolist() == pytest.approx([near, far])
    assert compute_metrics(solution, scenario).pair_std == pytest.approx((far - near) / 2.0)


def test_log_processor_turns_numpy_values_into_builtins() -> None:
    event = numpy_to_native_processor(
        None, "info", {"event": "x", "value": np.float64(1.5), "offsets": np.array([0, 2])}
    )
    assert event == {"event": "x", "value": 1.5, "offsets": [0, 2]}
    assert type(event["value"]) is float
