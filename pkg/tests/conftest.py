"""Shared graph and rate-table fixtures."""

import numpy as np
import pytest

from snnss import (
    build_cycle,
    build_named,
    build_torus,
    make_generalized_threshold,
    make_noisy_voter,
    make_threshold_voter,
)


@pytest.fixture(scope="session")
def cycle8():
    return build_cycle(8)


@pytest.fixture(scope="session")
def cycle12():
    return build_cycle(12)


@pytest.fixture(scope="session")
def heawood():
    return build_named("heawood")


@pytest.fixture(scope="session")
def petersen():
    return build_named("petersen")


@pytest.fixture(scope="session")
def cube():
    return build_named("cube")


@pytest.fixture(scope="session")
def torus44():
    return build_torus([4, 4])


@pytest.fixture(scope="session")
def nv_rates():
    # lambda = (0.5, 1.5, 2.5), mu = (2.7, 1.7, 0.7)
    return make_noisy_voter(2, 1.0, 0.5, 0.7)


@pytest.fixture(scope="session")
def c3_rates():
    # s = 2, h = 1, a = 1: lambda = (1, 1, 2), mu = (2, 1, 1)
    return make_threshold_voter(2, 2, 1.0, 1.0)


@pytest.fixture(scope="session")
def c4_rates():
    # s = 2, h = 1, a = 3, b = 1.5 satisfies h(a + b) = ab
    return make_generalized_threshold(2, 2, 1.0, 3.0, 1.5)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260818)
