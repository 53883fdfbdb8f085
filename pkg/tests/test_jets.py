import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recwkb.fields import ScalarField
from recwkb.jets import Jet, jet_compose_exponent
from recwkb.series import TaylorSeries

coeff = st.floats(min_value=-3, max_value=3, allow_nan=False, allow_infinity=False)


def random_jet(rng, R, T, lead=None):
    j = Jet(rng.standard_normal((R + 1, T + 1)) + 1j * rng.standard_normal((R + 1, T + 1)))
    if lead is not None:
        j.c[0, 0] = lead
    return j


def test_truncation_consistent_product():
    rng = np.random.default_rng(1)
    a = random_jet(rng, 3, 4)
    b = random_jet(rng, 3, 4)
    # compute in a larger space, truncate afterwards
    A = Jet.zeros(7, 9)
    B = Jet.zeros(7, 9)
    A.c[:4, :5] = a.c
    B.c[:4, :5] = b.c
    full = (A * B).c[:4, :5]
    assert np.abs((a * b).c - full).max() < 1e-12


def test_exp_times_exp_of_negative_is_one():
    rng = np.random.default_rng(2)
    a = random_jet(rng, 4, 4, lead=0.3)
    prod = a.exp() * (-a).exp()
    expect = Jet.constant(1.0, 4, 4)
    assert np.abs(prod.c - expect.c).max() < 1e-12


def test_exp_log_roundtrip():
    rng = np.random.default_rng(3)
    a = random_jet(rng, 4, 5, lead=1.0)  # constant term 1: log well defined
    back = a.log().exp()
    assert np.abs(back.c - a.c).max() < 1e-11


@settings(max_examples=25, deadline=None)
@given(st.lists(coeff, min_size=2, max_size=4), st.lists(coeff, min_size=2, max_size=4))
def test_jet_ring_homomorphism_on_polynomial_fields(ca, cb):
    # towers of f, g and of f*g at a point: jets multiply like the functions
    f = TaylorSeries(np.array(ca, dtype=complex))
    g = TaylorSeries(np.array(cb, dtype=complex))
    n = min(len(ca), len(cb)) - 1
    prod = (f * g).truncate(n)
    ref = np.polynomial.polynomial.polymul(ca, cb)[: n + 1]
    assert np.abs(prod.c - ref).max() < 1e-10


def test_compose_constant_rate_case():
    phi0 = ScalarField.from_function(lambda t: math.log(2.0) * t, (0, 1), n=32,
                                     adapt=False)
    J = jet_compose_exponent([phi0], 0.3, 1, 16, 4)
    # eps^0 column sums to the step ratio 2; every higher eps column vanishes
    assert abs(J.eval(1.0, 0.0) - 2.0) < 1e-11
    assert np.abs(J.c[:, 1:]).max() < 1e-9


def test_compose_direct_rate_evaluation():
    phi0 = ScalarField.from_function(lambda t: np.exp(t) - 1, (0, 1), n=48,
                                     adapt=False)
    J = jet_compose_exponent([phi0], 0.0, 1, 16, 6)
    assert abs(sum(J.c[:, 0]) - math.e) < 1e-11


def test_compose_zero_shift():
    phi0 = ScalarField.from_function(lambda t: np.exp(t) - 1, (0, 1), n=48,
                                     adapt=False)
    phi1 = ScalarField.from_function(lambda t: 0.5 * t, (0, 1), n=16, adapt=False)
    J = jet_compose_exponent([phi0, phi1], 0.0, 0, 8, 4)
    # j = 0 at the base point: identically 1 at eps^0, corrections only from
    # the t >= 1 fields, no step-offset rows
    assert abs(J.c[0, 0] - 1.0) < 1e-13
    assert np.abs(J.c[1:, :]).max() < 1e-13
    assert np.abs(J.c[0, 1:]).max() > 0  # Phi_1 feeds higher orders


def test_jet_eval_matches_brute_force():
    rng = np.random.default_rng(4)
    a = random_jet(rng, 3, 3)
    h, e = 0.37, 0.21
    brute = sum(
        a.c[r, t] * h**r * e**t for r in range(4) for t in range(4)
    )
    assert abs(a.eval(h, e) - brute) < 1e-13
