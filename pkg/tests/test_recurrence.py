import numpy as np
import pytest

from recwkb.errors import NonsingularityViolation, ParseError, UnknownPreset
from recwkb.recurrence import parse_spec, preset, serialize


def test_parse_simple_geometric():
    spec = parse_spec(
        """
name geometric
order 1
interval 0 1
coeff 0 epspow 0 : -2
coeff 1 epspow 0 : 1
"""
    )
    assert spec.l == 1
    assert abs(spec.coeff_value(0, 0.3, 0.0) + 2.0) < 1e-14
    assert abs(spec.coeff_value(1, 0.3, 0.0) - 1.0) < 1e-14


def test_bessel_preset_coefficients():
    b = preset("bessel")
    xs = np.linspace(0.5, 1.5, 7)
    assert np.abs(b.coeffs[1].terms[0](xs) + 2 * (1 + xs)).max() < 1e-12
    vals = [complex(b.coeff_value(j, 1.0, 0.0)) for j in range(3)]
    assert np.allclose(vals, [1, -4, 1], atol=1e-13)


def test_euler_preset():
    e = preset("euler")
    assert abs(complex(e.coeff_value(0, 0.0, 0.0)) + np.e) < 1e-13


def test_euler_scheme_preset():
    s = preset("euler_scheme")
    vals = [complex(c.terms[0](0.37)) for c in s.coeffs]
    assert np.allclose(vals, [1, -2, 1], atol=1e-13)
    # the eps^2 term carries the potential
    assert abs(complex(s.coeff_value(1, 0.3, 0.1)) - (-2 - 0.01)) < 1e-13


def test_nonsingularity_violation():
    with pytest.raises(NonsingularityViolation):
        parse_spec(
            """
order 1
interval 0 1
coeff 0 epspow 0 : 1
coeff 1 epspow 0 : x
"""
        )


def test_round_trip():
    b = preset("bessel")
    b2 = parse_spec(serialize(b))
    xs = np.linspace(*b.interval, 41)
    for j in range(3):
        d = np.abs(b.coeff_value(j, xs, 0.177) - b2.coeff_value(j, xs, 0.177))
        assert d.max() < 1e-12


def test_presets_have_exact_eval():
    for name in ("euler", "bessel", "euler_scheme"):
        spec = preset(name)
        assert spec.exact_exprs is not None
        assert all(e is not None for e in spec.exact_exprs)


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as err:
        parse_spec("order 1\ninterval 0 1\ncoeff 0 epspow 0 : exp(x\ncoeff 1 epspow 0 : 1")
    assert err.value.line == 3


def test_unknown_directive():
    with pytest.raises(ParseError):
        parse_spec("order 1\ninterval 0 1\nbogus 3\ncoeff 0 epspow 0 : 1\ncoeff 1 epspow 0 : 1")


def test_unknown_preset():
    with pytest.raises(UnknownPreset):
        preset("not-a-preset")


def test_unknown_function_in_expression():
    with pytest.raises(ParseError):
        parse_spec(
            "order 1\ninterval 0 1\ncoeff 0 epspow 0 : tanh(x)+2\ncoeff 1 epspow 0 : 1"
        )


def test_expression_jets_match_derivatives():
    spec = parse_spec(
        """
order 1
interval 0 1
coeff 0 epspow 0 : -exp(sin(x))-2
coeff 1 epspow 0 : 1
"""
    )
    t = spec.coeffs[0].taylor_term(0, np.array([0.4]), 3)
    f = lambda x: -np.exp(np.sin(x)) - 2
    h = 1e-3
    d1 = (f(0.4 + h) - f(0.4 - h)) / (2 * h)
    d2 = (f(0.4 + h) - 2 * f(0.4) + f(0.4 - h)) / h**2
    assert abs(t.c[1][0] - d1) < 1e-6
    assert abs(t.c[2][0] - d2 / 2) < 1e-5
