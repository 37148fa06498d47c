import math

import numpy as np
import pytest

from risklt import ExponentialClaims, ModelParams, ProductIndicator, SamplePath


@pytest.fixture
def unit_params():
    return ModelParams(x0=0.0, c=1.0, alpha=1.0, claims=ExponentialClaims(1.0))


@pytest.fixture
def pstar(unit_params):
    """x0=0, c=1, one claim of 3 at time 2, observed up to 4."""
    return SamplePath(unit_params, [2.0], [3.0], 4.0)


@pytest.fixture
def flat_path():
    """No jumps: x0=1, c=2 on [0, 1]."""
    params = ModelParams(x0=1.0, c=2.0, alpha=1.0, claims=ExponentialClaims(1.0))
    return SamplePath(params, [], [], 1.0)


@pytest.fixture
def paper_params():
    return ModelParams(x0=4.0, c=1.1, alpha=1.0, claims=ExponentialClaims(1.0))


@pytest.fixture
def positive_quadrant():
    return ProductIndicator.rectangle((0.0, math.inf), [(0.0, math.inf)])

