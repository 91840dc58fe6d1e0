import numpy as np
import pytest

from spotsim.grid import Field, GridSpec


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_field(spec: GridSpec, rng, low=0.0, high=1.0) -> Field:
    return Field(spec, rng.uniform(low, high, spec.shape))
