import numpy as np
import pytest

from pinchplace.channel import SPEED_OF_LIGHT, LinkBudget, Scenario, UserArray, WaveguideParams


@pytest.fixture
def wg():
    return WaveguideParams()


@pytest.fixture
def unit_wg():
    """lambda = 1 m, lambda_g = 0.5 m."""
    return WaveguideParams(carrier_frequency=SPEED_OF_LIGHT, effective_refractive_index=2.0, feed_x=0.0)


@pytest.fixture
def pair(wg):
    return Scenario(wg, UserArray(np.array([9.9, 10.1]), 4.0), 8, LinkBudget.from_dbm(30.0))


def make_scenario(positions, d=4.0, n=16, power_dbm=30.0, wg=None):
    return Scenario(wg or WaveguideParams(), UserArray(np.asarray(positions, dtype=float), d), n, LinkBudget.from_dbm(power_dbm))
