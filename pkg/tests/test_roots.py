import math

import numpy as np
import pytest

from recwkb.errors import NonGenericCrossing
from recwkb.recurrence import parse_spec
from recwkb.roots import (
    branch_values_pointwise,
    char_roots_at,
    detect_crossings,
    partition_by_modulus,
    region_branch,
    track_branches,
)


def test_char_roots_bessel_at_one(bessel):
    # quadratic-formula oracle for lam^2 - 4 lam + 1
    r = np.sort(char_roots_at(bessel, 1.0).real)
    assert abs(r[1] - (2 + math.sqrt(3))) < 1e-12
    assert abs(r[0] - (2 - math.sqrt(3))) < 1e-12


def test_char_roots_linear(const_spec):
    r = char_roots_at(const_spec, 0.4)
    assert len(r) == 1 and abs(r[0] - 2.0) < 1e-13


def test_char_roots_double_root(bessel_cross):
    r = char_roots_at(bessel_cross, 0.0)
    assert np.abs(r - 1.0).max() < 1e-6  # double root: sqrt-sensitive


def test_track_branches_regular(bessel, bessel_branches):
    assert len(bessel_branches) == 2
    ranks = sorted(b.modulus_rank for b in bessel_branches)
    assert ranks == [0, 1]
    # permutation consistency at grid nodes
    xs = np.linspace(0.52, 1.48, 101)
    for x in xs[::10]:
        vals = np.sort_complex(np.array([b(x) for b in bessel_branches]))
        ref = np.sort_complex(char_roots_at(bessel, x))
        assert np.abs(vals - ref).max() < 1e-9


def test_track_constant_branches(const_spec):
    br = track_branches(const_spec)
    assert len(br) == 1
    assert np.abs(br[0].lam.values - 2.0).max() < 1e-12


def test_partition_single_region(bessel, bessel_branches):
    part = partition_by_modulus(bessel_branches)
    assert len(part) == 1
    lo, hi, perm, ties = part.regions[0]
    assert (lo, hi) == bessel.interval
    assert not any(ties)


def test_partition_constant(const_spec):
    part = partition_by_modulus(track_branches(const_spec))
    assert len(part) == 1


def test_partition_splits_at_crossing(bessel_cross, bessel_cross_branches):
    part = partition_by_modulus(bessel_cross_branches)
    assert len(part.regions) == 2
    boundary = part.regions[0].hi
    assert abs(boundary) < 1e-3
    assert any(part.regions[0].ties)      # conjugate pair: tied moduli
    assert not any(part.regions[1].ties)  # split side: strict ordering


def test_region_ordering_random_samples(bessel, bessel_branches):
    part = partition_by_modulus(bessel_branches)
    lo, hi, perm, _ = part.regions[0]
    rng = np.random.default_rng(11)
    xs = rng.uniform(lo, hi, 1000)
    for x in xs[:: 25]:
        vals = branch_values_pointwise(bessel_branches, x)
        mods = [abs(vals[m]) for m in perm]
        assert all(mods[i] <= mods[i + 1] + 1e-12 for i in range(len(mods) - 1))


def test_detect_crossing_bessel(bessel_cross, bessel_cross_branches, bessel_crossing):
    c = bessel_crossing
    assert abs(c.x_star) < 1e-8
    assert c.pair in ((0, 1), (1, 0))
    assert abs(c.exponent - 0.5) < 0.02
    # genericity constant on the tight window (gap = 2 sqrt(x^2 + 2x))
    tight = detect_crossings(bessel_cross_branches, bessel_cross, window=0.05)
    assert abs(tight[0].genericity_constant - 2 * math.sqrt(2)) / (2 * math.sqrt(2)) < 0.05


def test_detect_no_crossing(bessel, bessel_branches):
    assert detect_crossings(bessel_branches, bessel) == []


def test_non_generic_crossing_rejected():
    # roots 1 +- x: gap linear in x, exponent 1
    spec = parse_spec(
        """
order 2
interval -0.5 0.5
coeff 0 epspow 0 : 1-x^2
coeff 1 epspow 0 : -2
coeff 2 epspow 0 : 1
"""
    )
    br = track_branches(spec)
    with pytest.raises(NonGenericCrossing) as err:
        detect_crossings(br, spec)
    assert abs(err.value.exponent - 1.0) < 0.05


def test_branch_jets_match_implicit_derivative(bessel, bessel_branches):
    big = [b for b in bessel_branches if b.modulus_rank == 1][0]
    t = big.taylor(np.array([1.0]), 3)
    # lam(x) = (1+x) + sqrt(x^2+2x): lam'(1) = 1 + 2/sqrt(3)
    assert abs(t.c[1][0] - (1 + 2 / math.sqrt(3))) < 1e-12


def test_region_branch_accurate_near_cusp(bessel_cross):
    br = region_branch(bessel_cross, (0.0035, 0.08), rank=0, n=64)
    xs = np.linspace(0.004, 0.079, 41)
    exact = (1 + xs) - np.sqrt(xs**2 + 2 * xs)
    assert np.abs(br(xs) - exact).max() < 1e-9
