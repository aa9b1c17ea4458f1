from __future__ import annotations

import pytest

from app.models.scenario import Scenario
from app.services.scenario_service import default_scenario_template


@pytest.fixture
def template() -> Scenario:
    return default_scenario_template()


@pytest.fixture
def small_template() -> Scenario:
    """Short period and no protect distance so multi-drone plans always schedule."""
    return default_scenario_template().replace(n_slots=12, s_min=3, z_min=0.0)


@pytest.fixture
def single_aoi_scenario() -> Scenario:
    return default_scenario_template().replace(aois=((200.0, 0.0),), n_drones=1, n_slots=12)

