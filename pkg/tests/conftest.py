"""
Shared fixtures.
"""
import numpy as np
import pytest

from latentgsa.models.schemas import PBPKConfig
from latentgsa.services.pbpk import MALE, individual_from_covariates, load_drug
from latentgsa.services.sampling import RandomStream

SEEDS = (11, 12, 13, 14, 15)


@pytest.fixture
def stream():
    return RandomStream(seed=7)


@pytest.fixture(scope="session")
def drug():
    return load_drug()


@pytest.fixture(scope="session")
def pbpk_config():
    return PBPKConfig()


@pytest.fixture(scope="session")
def mean_male(pbpk_config):
    """Male of mean height and mid-range BMI with mean enzyme abundances."""
    return individual_from_covariates(
        sex=MALE,
        height_cm=176.7,
        bmi=21.7,
        cyp3a4=137.0,
        cyp3a5=103.0,
        mppgl=39.79,
        config=pbpk_config,
    )


@pytest.fixture
def seed_average():
    """Average of ``run(seed)`` (an array of indices) over several seeds."""
    def _average(run, seeds=SEEDS):
        return np.mean([np.asarray(run(s), dtype=float) for s in seeds], axis=0)
    return _average
