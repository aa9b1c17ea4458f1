import itertools

import numpy as np
import pytest

from app.core.channel import d2u_pathloss
from app.core.exceptions import InfeasibleError, SeparationInfeasibleError
from app.models.scenario import Scenario
from app.schemas.planner import PSOParams
from app.services.baseline_service import StaticPSOService, plan_static_pso
from app.services.planner_service import validate_solution
from app.services.scenario_service import generate_scenario, height_bounds

QUICK = PSOParams(swarm_size=20, iterations=60, rounds=1)


def test_static_deployment_is_valid_and_never_worse_than_its_start(small_template: Scenario) -> None:
    scenario = generate_scenario(5, 6, 2, template=small_template)
    deployment = plan_static_pso(scenario, QUICK)
    validate_solution(deployment, scenario)
    assert deployment.kind == "baseline"
    assert deployment.objective <= deployment.initial_objective
    assert deployment.positions.shape == (2, 3)
    assert deployment.iterations == 0 and deployment.converged


def test_same_seed_same_deployment(small_template: Scenario) -> None:
    scenario = generate_scenario(6, 4, 2, template=small_template)
    first = plan_static_pso(scenario, QUICK)
    second = plan_static_pso(scenario, QUICK)
    assert np.array_equal(first.positions, second.positions)
    assert first.association == second.association


def test_lone_drone_hovers_close_to_its_aoi(single_aoi_scenario: Scenario) -> None:
    deployment = plan_static_pso(single_aoi_scenario, PSOParams(seed=3))
    floor = float(d2u_pathloss(0.0, 30.0, single_aoi_scenario.d2u_env))
    assert floor - 1e-9 <= deployment.objective < 75.0
    x, y, h = deployment.positions[0]
    bounds = height_bounds(single_aoi_scenario, float(np.hypot(x, y)))
    assert bounds.lower - 1e-6 <= h <= bounds.upper + 1e-6


def test_initial_positions_respect_the_protect_distance(template: Scenario) -> None:
    scenario = generate_scenario(0, 10, 5, template=template)
    positions = StaticPSOService(scenario, QUICK).initial_positions()
    for a, b in itertools.combinations(positions, 2):
        assert np.linalg.norm(a - b) >= scenario.z_min


def test_unplaceable_fleet_is_separation_infeasible(template: Scenario) -> None:
    scenario = template.replace(r_bs=100.0, z_min=500.0, n_drones=2, aois=((0.0, 0.0),))
    with pytest.raises(SeparationInfeasibleError):
        StaticPSOService(scenario, QUICK).initial_positions()


def test_association_beyond_capacity_is_infeasible(small_template: Scenario) -> None:
    scenario = generate_scenario(1, 5, 1, template=small_template)
    service = StaticPSOService(scenario, QUICK)
    with pytest.raises(InfeasibleError) as exc_info:
        service.associate(np.array([[0.0, 0.0, 30.0]]))
    assert exc_info.value.constraint == "capacity"


def test_placement_keeps_other_drones_at_a_distance(template: Scenario) -> None:
    scenario = template.replace(aois=((0.0, 0.0),), n_drones=2, n_slots=20, s_min=10)
    service = StaticPSOService(scenario, QUICK)
    other = np.array([[0.0, 0.0, 30.0]])
    placed = service.place_drone(np.array([400.0, 0.0, 40.0]), [0], other)
    assert np.linalg.norm(placed - other[0]) >= scenario.z_min
