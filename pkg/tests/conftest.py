import numpy as np
import pytest


@pytest.fixture
def rng():
    """Fixed-seed generator so sampling oracles are reproducible."""
    return np.random.default_rng(20240613)
