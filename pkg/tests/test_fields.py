import math

import numpy as np
import pytest

from recwkb.errors import BranchAmbiguity, NearZeroDivisor, OrderOverflow
from recwkb.fields import ScalarField, field_algebra


def test_grid_values_reproduced():
    f = ScalarField.from_function(np.exp, (0, 1), n=32, adapt=False)
    assert np.abs(f(f.grid) - f.values).max() < 5e-15


def test_spectral_accuracy_exp_n32():
    f = ScalarField.from_function(np.exp, (0, 1), n=32, adapt=False)
    x = f.grid
    assert np.abs(f.derivative()(x) - np.exp(x)).max() < 1e-12
    assert np.abs(f.antiderivative(0.0)(x) - (np.exp(x) - 1)).max() < 1e-12


def test_antiderivative_then_derivative_roundtrip():
    f = ScalarField.from_function(lambda x: np.exp(x) * np.cos(3 * x), (0, 1),
                                  n=64, adapt=False)
    g = f.antiderivative().derivative()
    n = f.n
    tol = 10 * np.finfo(float).eps * n**2 * np.abs(f.values).max()
    assert np.abs(g.values - f.values).max() <= tol


def test_mul_identity():
    one = ScalarField.from_function(lambda x: np.ones_like(x), (0, 1), n=16, adapt=False)
    ident = ScalarField.from_function(lambda x: x, (0, 1), n=16, adapt=False)
    prod = field_algebra(one, ident, "mul")
    assert np.abs(prod(prod.grid) - prod.grid).max() <= 1e-14


def test_log_of_exp_inverse_pair():
    g = ScalarField.from_function(np.exp, (0, 1), n=32, adapt=False)
    lg = field_algebra(None, g, "log")
    assert np.abs(lg.values - lg.grid).max() <= 1e-12


def test_log_constant():
    # scalar-logarithm oracle for the constant 2 + sqrt(3)
    c = 2 + math.sqrt(3.0)
    g = ScalarField.constant(c, (0, 1))
    expected = math.log(c)  # 1.3169578969248166
    assert abs(expected - 1.3169578969248166) < 1e-15
    assert np.abs(field_algebra(None, g, "log").values - expected).max() < 1e-14


def test_continuous_log_branch_unwraps():
    # winds through the negative real axis; principal log would jump
    g = ScalarField.from_function(lambda x: np.exp(1j * 3.0 * x), (0, 2), n=128,
                                  adapt=False)
    lg = g.log()
    assert np.abs(lg.values - 1j * 3.0 * lg.grid).max() < 1e-10


def test_near_zero_divisor():
    f = ScalarField.constant(1.0, (0, 1))
    g = ScalarField.from_function(lambda x: x - 0.5, (0, 1), n=32, adapt=False)
    with pytest.raises(NearZeroDivisor):
        field_algebra(f, g, "div")


def test_log_branch_ambiguity_near_zero():
    g = ScalarField.from_function(lambda x: x - 0.5 + 0j, (0, 1), n=32, adapt=False)
    with pytest.raises(BranchAmbiguity):
        field_algebra(None, g, "log")


def test_adaptive_resolution_refines():
    f = ScalarField.from_function(lambda x: np.exp(np.sin(20 * x)), (0, 1))
    x = np.linspace(0, 1, 777)
    assert np.abs(f(x) - np.exp(np.sin(20 * x))).max() < 1e-9
    assert f.n > 64


def test_exp_log_consistency():
    f = ScalarField.from_function(lambda x: 1 + 0.3 * np.sin(x), (0, 1), n=32,
                                  adapt=False)
    back = field_algebra(None, field_algebra(None, f, "log"), "exp")
    assert np.abs(back.values - f.values).max() < 1e-13


def test_pow_complex_exponent():
    f = ScalarField.from_function(lambda x: 1.5 + x, (0, 1), n=32, adapt=False)
    p = f.pow(0.5)
    assert np.abs(p.values - np.sqrt(1.5 + p.grid)).max() < 1e-13


def test_taylor_spectral_and_overflow():
    f = ScalarField.from_function(np.exp, (0, 1), n=64, adapt=False)
    t = f.taylor(0.5, 4)
    for r in range(5):
        assert abs(t.c[r] - np.exp(0.5) / math.factorial(r)) < 1e-9
    small = ScalarField.from_function(np.exp, (0, 1), n=8, adapt=False)
    with pytest.raises(OrderOverflow):
        small.taylor(0.5, 7)
