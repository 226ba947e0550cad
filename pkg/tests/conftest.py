import numpy as np
import pytest

from simbeam.jobs import small_config, trial_channels


@pytest.fixture
def config():
    """16 meta-atoms in 3 layers serving 2 users"""
    return small_config()


@pytest.fixture
def instance(config):
    context, channels = trial_channels(config, 0)
    return context.stack, channels


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
