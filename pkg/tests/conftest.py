import numpy as np
import pytest

import mtlab


@pytest.fixture(scope="session")
def gn_report_n2():
    return mtlab.maximize_gn(2)


@pytest.fixture(scope="session")
def gn_report_n3():
    return mtlab.maximize_gn(3)


@pytest.fixture(scope="session")
def gn_report_n4():
    return mtlab.maximize_gn(4)


@pytest.fixture(scope="session")
def fast_opts():
    """Light optimizer settings for tests that only need qualitative behavior."""
    return mtlab.MaximizeOptions(restarts=8, n_nodes=256, seed=5)


def random_monotone_profile(grid, rng, amplitude=1.0):
    """Non-increasing random profile: cumulative sums of random decrements."""
    steps = rng.random(grid.n_nodes)
    vals = np.cumsum(steps[::-1])[::-1]
    return mtlab.RadialProfile(grid, amplitude * vals / vals.max())


def smooth_bump_profile(grid, rng, n_bumps=3):
    """Random smooth mixture of Gaussian bumps (possibly off-center)."""
    r = grid.nodes
    vals = np.zeros_like(r)
    for _ in range(n_bumps):
        center = rng.uniform(0.0, 0.6 * grid.r_max)
        width = rng.uniform(grid.r_max / 15.0, grid.r_max / 4.0)
        amp = rng.uniform(0.2, 1.0)
        vals += amp * np.exp(-(((r - center) / width) ** 2))
    return mtlab.RadialProfile(grid, vals)
