from fractions import Fraction as F

import pytest

from betashadow.maps import BetaParams, BranchSpec, PiecewiseAffineMap, beta_map, RIGHT


@pytest.fixture
def doubling():
    return beta_map(BetaParams(F(2), F(0)))


@pytest.fixture
def beta15():
    return beta_map(BetaParams(F(3, 2), F(1, 4)))


@pytest.fixture
def lorenz():
    """Two increasing branches with f(0.5) = 0.1 taken from the right."""
    return PiecewiseAffineMap(
        (F(1, 2),), (BranchSpec(F(8, 5), F(1, 10)), BranchSpec(F(8, 5), F(-7, 10))), (RIGHT,)
    )


@pytest.fixture
def folded():
    """A map with one decreasing branch."""
    return PiecewiseAffineMap(
        (F(1, 2),), (BranchSpec(F(-3, 2), F(9, 10)), BranchSpec(F(3, 2), F(-1, 2))), (RIGHT,)
    )
