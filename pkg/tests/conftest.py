import math

import pytest

from focklab.kernel import moments, needed_terms

ALPHA = 0.5


@pytest.fixture(scope="session")
def tab40():
    """Moment table covering pairwise evaluations on the 41-point lattice."""
    return moments(ALPHA, needed_terms(ALPHA, 2.0 * 41.0))


@pytest.fixture(scope="session")
def tab_wide():
    """Moment table covering the two-sided gallery up to 64 points."""
    return moments(ALPHA, needed_terms(ALPHA, 2.0 * 160.0))
