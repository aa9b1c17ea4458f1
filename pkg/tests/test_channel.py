import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from app.core.channel import (
    angle_objective,
    d2b_feasible_height_interval,
    d2b_feasible_horizontal_radius,
    d2b_pathloss,
    d2u_angle_derivatives,
    d2u_pathloss,
    d2u_pathloss_from_angle,
    elevation_angle,
    los_probability,
    optimal_elevation_angle,
)
from app.core.exceptions import UndefinedGeometryError
from app.models.channel import D2BEnvParams, D2UEnvParams

SUBURBAN = D2UEnvParams()
BACKHAUL = D2BEnvParams()


def test_optimal_angle_matches_golden_section_oracle() -> None:
    theta = optimal_elevation_angle(SUBURBAN)
    oracle = minimize_scalar(
        lambda t: float(angle_objective(t, SUBURBAN)), bracket=(5.0, 20.0, 60.0), method="golden"
    ).x
    assert theta == pytest.approx(20.3, abs=0.5)
    assert theta == pytest.approx(oracle, abs=1e-3)


def test_optimal_angle_without_los_benefit_is_zero() -> None:
    env = D2UEnvParams(eta_los=5.0, eta_nlos=5.0)
    assert optimal_elevation_angle(env) == 0.0


def test_derivative_sign_pattern() -> None:
    inflection = SUBURBAN.a + math.log(SUBURBAN.a) / SUBURBAN.b
    assert inflection == pytest.approx(8.57, abs=0.01)
    assert d2u_angle_derivatives(inflection, SUBURBAN)[0] < 0.0
    assert d2u_angle_derivatives(89.0, SUBURBAN)[0] > 0.0
    assert d2u_angle_derivatives(optimal_elevation_angle(SUBURBAN), SUBURBAN)[0] == pytest.approx(0.0, abs=1e-6)


def test_angle_objective_is_quasi_convex() -> None:
    rng = np.random.default_rng(7)
    a = rng.uniform(0.0, 89.0, size=10_000)
    b = rng.uniform(0.0, 89.0, size=10_000)
    lam = rng.uniform(0.0, 1.0, size=10_000)
    mixed = angle_objective(lam * a + (1.0 - lam) * b, SUBURBAN)
    bound = np.maximum(angle_objective(a, SUBURBAN), angle_objective(b, SUBURBAN))
    assert np.all(mixed <= bound + 1e-9)


@given(
    r=st.floats(min_value=1.0, max_value=2000.0),
    h=st.floats(min_value=1.0, max_value=500.0),
)
def test_angle_form_agrees_with_distance_form(r: float, h: float) -> None:
    theta = float(elevation_angle(r, h))
    assert float(d2u_pathloss_from_angle(theta, r, SUBURBAN)) == pytest.approx(
        float(d2u_pathloss(r, h, SUBURBAN)), abs=1e-9
    )


def test_hover_pathloss_is_free_space_plus_los_excess() -> None:
    expected = SUBURBAN.fspl_offset + 20.0 * math.log10(30.0) + SUBURBAN.eta_los
    assert float(d2u_pathloss(0.0, 30.0, SUBURBAN)) == pytest.approx(expected, abs=1e-9)
    assert float(los_probability(0.0, 30.0, SUBURBAN)) == pytest.approx(1.0, abs=1e-12)


def test_pathloss_is_vectorized() -> None:
    r = np.array([[0.0, 100.0], [200.0, 300.0]])
    losses = d2u_pathloss(r, 50.0, SUBURBAN)
    assert losses.shape == (2, 2)
    assert np.all(np.diff(losses.ravel()) > 0.0)


def test_zero_distance_is_undefined() -> None:
    with pytest.raises(UndefinedGeometryError):
        elevation_angle(0.0, 0.0)
    with pytest.raises(UndefinedGeometryError):
        d2u_pathloss(0.0, 0.0, SUBURBAN)
    with pytest.raises(UndefinedGeometryError):
        d2b_pathloss(0.0, 10.0, BACKHAUL)


def test_height_interval_near_the_base_station_is_unbounded() -> None:
    interval = d2b_feasible_height_interval(50.0, BACKHAUL, h_ceiling=300.0)
    assert not interval.empty
    assert interval.lower == 0.0
    assert interval.upper == 300.0


def test_height_interval_upper_edge_meets_the_cap() -> None:
    interval = d2b_feasible_height_interval(500.0, BACKHAUL)
    assert interval.lower == 0.0
    assert 40.0 < interval.upper < 60.0
    at_edge = float(d2b_pathloss(500.0, elevation_angle(500.0, interval.upper), BACKHAUL))
    assert at_edge == pytest.approx(BACKHAUL.p_db_max, abs=1e-4)
    above = float(d2b_pathloss(500.0, elevation_angle(500.0, interval.upper + 1.0), BACKHAUL))
    assert above > BACKHAUL.p_db_max


def test_tight_cap_leaves_no_height() -> None:
    env = D2BEnvParams(p_db_max=40.0)
    assert d2b_feasible_height_interval(800.0, env).empty


def test_horizontal_radius_is_capped_when_everything_is_feasible() -> None:
    assert d2b_feasible_horizontal_radius(30.0, BACKHAUL, 900.0) == 900.0
    assert d2b_feasible_horizontal_radius(500.0, D2BEnvParams(p_db_max=math.inf), 900.0) == 900.0


def test_horizontal_radius_sits_on_the_cap_boundary() -> None:
    radius = d2b_feasible_horizontal_radius(100.0, BACKHAUL, 900.0)
    assert radius < 900.0

    def loss(r: float) -> float:
        return float(d2b_pathloss(r, elevation_angle(r, 100.0), BACKHAUL))

    assert loss(radius) <= BACKHAUL.p_db_max + 1e-6
    assert loss(radius + 1.0) > BACKHAUL.p_db_max


def test_horizontal_radius_finds_a_pocket_between_samples() -> None:
    r = np.linspace(150.0, 900.0, 75001)
    losses = d2b_pathloss(r, np.degrees(np.arctan2(30.0, r)), BACKHAUL)
    tight = replace(BACKHAUL, p_db_max=float(losses.min()) + 0.01)

    fine = d2b_feasible_horizontal_radius(30.0, tight, 900.0)
    coarse = d2b_feasible_horizontal_radius(30.0, tight, 900.0, samples=10)
    assert fine > r[losses.argmin()]
    assert coarse == pytest.approx(fine, abs=1e-3)
