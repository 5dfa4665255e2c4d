"""Session-scoped runs shared by several test modules."""
import math

import pytest

from rswlab.fields import make_bump_data
from rswlab.grid import make_grid
from rswlab.kernels import GammaLaw
from rswlab.solver import SolverConfig, run

LAW2 = GammaLaw(2.0)
#: max |d/ds (1 - s^2)^3| = (6/sqrt 5)(4/5)^2
BUMP_SLOPE = 6.0 / math.sqrt(5.0) * 0.64


def smooth_data(n):
    return make_bump_data("height-bump", 0.01, 2.0, make_grid(-30.0, 30.0, n))


@pytest.fixture(scope="session")
def law2():
    return LAW2


@pytest.fixture(scope="session")
def smooth_runs():
    """Small height bump to t = 10 at two resolutions."""
    cfg = SolverConfig(t_end=10.0, sample_interval=0.1)
    return {n: (smooth_data(n), run(smooth_data(n), LAW2, cfg)) for n in (1024, 2048)}
