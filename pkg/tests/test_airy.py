import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import airy as scipy_airy

from qbouncer.airy import (airy_ai, airy_ai_prime, airy_ai_scaled, airy_derivatives_at,
                           airy_pair, airy_zeros, zero_estimate)
from qbouncer.errors import DomainError


def scale(x):
    # natural size of Ai and Ai' on the oscillatory side
    m = np.maximum(np.abs(x), 1.0)
    return m ** -0.25, m ** 0.25


def test_values_at_origin(oracles):
    assert airy_ai(0.0) == pytest.approx(oracles["ai0"], rel=1e-15)
    assert airy_ai_prime(0.0) == pytest.approx(oracles["aip0"], rel=1e-15)
    assert airy_ai(0.0) == pytest.approx(0.3550280538878172, abs=1e-15)
    assert airy_ai_prime(0.0) == pytest.approx(-0.2588194037928068, abs=1e-15)


def test_against_frozen_reference(oracles):
    for rec in oracles["airy"]:
        x = rec["x"]
        ai, aip = airy_pair(x)
        s0, s1 = scale(x)
        if x > 0:
            assert ai == pytest.approx(rec["ai"], rel=1e-12)
            assert aip == pytest.approx(rec["aip"], rel=1e-12)
        else:
            assert abs(ai - rec["ai"]) < 1e-13 * s0
            assert abs(aip - rec["aip"]) < 1e-13 * s1


@settings(max_examples=300, deadline=None)
@given(st.floats(-220.0, 100.0))
def test_matches_independent_implementation(x):
    ai, aip = airy_pair(x)
    ref, refp, _, _ = scipy_airy(x)
    s0, s1 = scale(x)
    assert abs(ai - ref) < 5e-12 * s0 + 1e-15 * abs(ref)
    assert abs(aip - refp) < 5e-12 * s1 + 1e-15 * abs(refp)


def test_array_shape_and_scalar_type():
    x = np.linspace(-3, 3, 12).reshape(3, 4)
    assert airy_ai(x).shape == (3, 4)
    assert isinstance(airy_ai(1.0), float)
    assert airy_ai(np.array([])).shape == (0,)


def test_airy_equation_by_differences():
    x = np.linspace(-30, 10, 401)
    h = 1e-3
    second = (airy_ai(x + h) - 2 * airy_ai(x) + airy_ai(x - h)) / h ** 2
    # truncation error is about h^2 x^2 |Ai| / 12
    tol = h ** 2 * (1 + x ** 2) / 12 * np.maximum(np.abs(x), 1) ** -0.25 * 1.5 + 1e-9
    assert np.all(np.abs(second - x * airy_ai(x)) < tol)


def test_underflow_region():
    assert airy_ai(200.0) == 0.0
    assert airy_ai_scaled(200.0) == pytest.approx(
        1 / (2 * np.sqrt(np.pi) * 200 ** 0.25), rel=1e-3)


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_non_finite_rejected(bad):
    with pytest.raises(DomainError):
        airy_ai(bad)
    with pytest.raises(DomainError):
        airy_ai(np.array([0.0, bad]))


def test_higher_derivatives():
    x = np.array([-7.3, -1.0, 0.4, 2.0])
    ai, aip = airy_pair(x)
    d = airy_derivatives_at(x, ai, aip, 4)
    np.testing.assert_allclose(d[:, 2], x * ai, rtol=1e-14)
    np.testing.assert_allclose(d[:, 3], ai + x * aip, rtol=1e-14)
    np.testing.assert_allclose(d[:, 4], 2 * aip + x * x * ai, rtol=1e-13)


def test_first_zeros():
    table = airy_zeros(2)
    assert table.zeros[0] == pytest.approx(2.338107410459767, abs=1e-12)
    assert table.zeros[1] == pytest.approx(4.087949444130971, abs=1e-12)
    assert table.derivative_magnitudes[0] == pytest.approx(0.7012108227206906, abs=1e-12)


def test_zeros_against_frozen_reference(oracles):
    table = airy_zeros(500)
    for rec in oracles["zeros"]:
        n = rec["n"]
        assert table.zeros[n - 1] == pytest.approx(rec["z"], rel=2e-15, abs=1e-13)
        assert table.derivative_magnitudes[n - 1] == pytest.approx(rec["aip"], rel=1e-12)


def test_zeros_are_zeros_and_interlace():
    table = airy_zeros(500)
    z = table.zeros
    assert np.all(np.abs(airy_ai(-z)) < 1e-12)
    assert np.all(np.diff(z) > 0)
    # exactly one zero of Ai' between consecutive zeros of Ai
    mid = 0.5 * (z[:-1] + z[1:])
    assert np.all(np.sign(airy_ai_prime(-z[:-1])) != np.sign(airy_ai_prime(-z[1:])))
    assert np.all(np.abs(airy_ai(-mid)) > 0)


def test_zero_asymptotics():
    n = np.arange(10, 501)
    z = airy_zeros(500).zeros[9:]
    t = 1.5 * np.pi * (n - 0.25)
    two_term = t ** (2 / 3) * (1 + 5 / 48 * t ** -2)
    assert np.max(np.abs(z - two_term)) < 1e-6
    # the leading term alone is only good to a few parts in 1e4 at n = 10
    assert np.max(np.abs(z - zero_estimate(n))) < 1e-3


def test_normalization_integral():
    table = airy_zeros(50)
    for n in range(1, 51):
        zn = table.zeros[n - 1]
        z = np.linspace(0.0, zn + 15.0, 40001)
        phi = airy_ai(z - zn) / table.derivative_magnitudes[n - 1]
        assert np.trapezoid(phi ** 2, z) == pytest.approx(1.0, abs=1e-6)


def test_zero_table_is_read_only():
    table = airy_zeros(10)
    with pytest.raises(ValueError):
        table.zeros[0] = 1.0


@pytest.mark.parametrize("count", [0, -3, 2.5])
def test_bad_zero_count(count):
    with pytest.raises(DomainError):
        airy_zeros(count)
