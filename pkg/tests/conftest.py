import numpy as np
import pytest

from recwkb.recurrence import parse_spec, preset
from recwkb.roots import detect_crossings, track_branches
from recwkb.turning import interior_expansion
from recwkb.wkb import expand_branch


@pytest.fixture(scope="session")
def euler():
    return preset("euler")


@pytest.fixture(scope="session")
def euler_branch(euler):
    return track_branches(euler)[0]


@pytest.fixture(scope="session")
def euler_phi6(euler, euler_branch):
    return expand_branch(euler, euler_branch, order=6)


@pytest.fixture(scope="session")
def bessel():
    return preset("bessel")


@pytest.fixture(scope="session")
def bessel_branches(bessel):
    return track_branches(bessel)


@pytest.fixture(scope="session")
def bessel_phi4(bessel, bessel_branches):
    big = [b for b in bessel_branches if b.modulus_rank == 1][0]
    return expand_branch(bessel, big, order=4)


@pytest.fixture(scope="session")
def bessel_cross():
    return preset("bessel", interval=(-0.5, 0.5))


@pytest.fixture(scope="session")
def bessel_cross_branches(bessel_cross):
    return track_branches(bessel_cross)


@pytest.fixture(scope="session")
def bessel_crossing(bessel_cross, bessel_cross_branches):
    return detect_crossings(bessel_cross_branches, bessel_cross)[0]


@pytest.fixture(scope="session")
def bessel_tp(bessel_cross, bessel_crossing):
    return interior_expansion(bessel_cross, bessel_crossing, order=3)


@pytest.fixture(scope="session")
def const_spec():
    return parse_spec(
        """
order 1
interval 0 1
coeff 0 epspow 0 : -2
coeff 1 epspow 0 : 1
exact 0 : -2
exact 1 : 1
"""
    )


@pytest.fixture(scope="session")
def scheme_series():
    from recwkb.schemes import xi_series

    return xi_series(preset("euler_scheme"), order=4, cauchy=(0.0, 1.0))
