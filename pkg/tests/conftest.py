import dataclasses

import pytest

from isac_feedback import SystemConfig, make_grid, make_population, substream


@pytest.fixture(scope="session")
def cfg_default():
    """Reference configuration: 20 antennas, 50 users, 45 decoded."""
    return SystemConfig()


@pytest.fixture(scope="session")
def cfg_comm():
    """Communication-weighted config with the aligned initialization."""
    return dataclasses.replace(SystemConfig(), mu=1.0, init_sign="negated")


@pytest.fixture(scope="session")
def cfg_small():
    """Small, fast instance for gradient and oracle checks."""
    return dataclasses.replace(
        SystemConfig(), m=8, l=8, k_users=10, n_decoded=8,
        sense_grid_size=8, init_sign="negated")


def world(cfg, trial=0):
    pop = make_population(cfg, substream(cfg.seed, trial, "population"))
    return pop, make_grid(cfg)


@pytest.fixture()
def small_world(cfg_small):
    return world(cfg_small)
