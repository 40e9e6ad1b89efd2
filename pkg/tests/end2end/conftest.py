import numpy as np
import pytest

from fdstates import Scenario
from fdstates.base import load_preset

EPS = np.pi / 50


@pytest.fixture
def eps():
    return EPS


@pytest.fixture
def preset_scenario():
    def build(name):
        return Scenario.from_config(load_preset(name))

    return build
