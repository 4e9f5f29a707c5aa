import numpy as np
import pytest

from tilthover import load_preset, preset_names


@pytest.fixture(scope="session")
def presets():
    return {name: load_preset(name) for name in preset_names()}


@pytest.fixture()
def rng():
    # fixed seed; every randomized suite must be reproducible
    return np.random.default_rng(20260816)
