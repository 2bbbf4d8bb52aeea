"""Session fixtures for the full-scale statistical ensembles.

The acceptance tests share these so each heavy simulation runs once per
session (~40 s total).  Every fixture is a pure function of its seed.
"""

import pytest

from peekstat.simulate import (
    absorbed_walk_study,
    extrema_identity_study,
    peeking_inflation_study,
    r_validity_study,
    running_max_study,
)


@pytest.fixture(scope="session")
def identity_ensemble():
    # 1e3 paths x 1e4 steps of the fixed-step exponential martingale
    return extrema_identity_study(1000, 10_000, 4242, lam=0.5)


@pytest.fixture(scope="session")
def gap_ensemble():
    # 1e5 paths x 2e4 steps, predictable gap-scaled step sizes
    return running_max_study(100_000, 20_000, 31337)


@pytest.fixture(scope="session")
def fixed_step_ensemble():
    # 1e5 paths x 1e4 steps at lam = 1: the discrete-overshoot regime
    return running_max_study(100_000, 10_000, 808, lam=1.0)


@pytest.fixture(scope="session")
def r_validity_ensemble():
    return r_validity_study(100_000, 10_000, 90210, lam=1.0)


@pytest.fixture(scope="session")
def absorbed_walk_ensemble():
    return absorbed_walk_study(100_000, 20_000, 55555)


@pytest.fixture(scope="session")
def barrier_walk_ensemble():
    return absorbed_walk_study(100_000, 20_000, 7777, barrier=8.0)


@pytest.fixture(scope="session")
def inflation_ensemble():
    return peeking_inflation_study(100_000, (100, 1000, 10_000), 60606)
