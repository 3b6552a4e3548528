import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from domint import specfun

mpmath.mp.dps = 30


def mp_lower(a, x):
    # Gamma(a) - Gamma(a, x) continues the lower function to negative non-integer a
    return float(mpmath.gamma(a) - mpmath.gammainc(a, x))


non_integer = st.floats(-3.9, 4.0).filter(lambda a: abs(a - round(a)) > 1e-3)


@pytest.mark.parametrize("a", [0.3, 1.0, 2.5, -1 / 3, -2 / 3, -0.5, -1.25, -2.6])
@pytest.mark.parametrize("x", [1e-4, 0.05, 0.9, 3.0, 12.0])
def test_lower_matches_mpmath(a, x):
    assert specfun.lower_inc_gamma(a, x) == pytest.approx(mp_lower(a, x), rel=1e-12)


@given(a=non_integer, x=st.floats(1e-3, 25.0))
def test_series_and_recurrence_agree(a, x):
    series = specfun.lower_inc_gamma_series(a, x)
    recur = float(specfun.lower_inc_gamma(a, x))
    assert recur == pytest.approx(series, rel=1e-10)


@given(a=st.floats(0.05, 6.0), x=st.floats(0.0, 40.0))
def test_lower_plus_upper_is_gamma(a, x):
    total = specfun.lower_inc_gamma(a, x) + specfun.upper_inc_gamma(a, x)
    assert total == pytest.approx(math.gamma(a), rel=1e-12)


@given(a=non_integer, x=st.floats(1e-3, 10.0))
def test_recurrence_identity(a, x):
    assume(abs(a) > 1e-2)
    lhs = specfun.lower_inc_gamma(a + 1, x)
    rhs = a * specfun.lower_inc_gamma(a, x) - x**a * math.exp(-x)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("a", [0.0, -1.0, -3.0])
def test_poles_raise(a):
    with pytest.raises(specfun.SpecialFunctionError):
        specfun.lower_inc_gamma(a, 1.0)
    with pytest.raises(specfun.SpecialFunctionError):
        specfun.lower_inc_gamma_series(a, 1.0)


def test_negative_argument_raises():
    with pytest.raises(specfun.DomainError):
        specfun.lower_inc_gamma(0.5, -1.0)


def test_series_limits_at_zero():
    assert specfun.lower_inc_gamma_series(1.5, 0.0) == 0.0
    assert specfun.lower_inc_gamma_series(-0.5, 0.0) == -math.inf


def test_series_gives_up_for_huge_argument():
    with pytest.raises(specfun.SpecialFunctionError):
        specfun.lower_inc_gamma_series(-0.5, 800.0)


@pytest.mark.parametrize("a", [1 / 3, 2 / 3, 1.0, 7 / 3])
def test_scaled_lower(a):
    x = np.array([0.0, 1e-8, 0.3, 0.999999, 1.0, 1.000001, 4.0, 30.0])
    got = specfun.scaled_lower_inc_gamma(a, x)
    assert got[0] == pytest.approx(1 / a, rel=1e-15)
    for xi, gi in zip(x[1:], got[1:]):
        want = float(mpmath.gammainc(a, 0, xi) * mpmath.mpf(xi) ** (-a))
        assert gi == pytest.approx(want, rel=1e-13)


def test_scaled_lower_requires_positive_order():
    with pytest.raises(specfun.SpecialFunctionError):
        specfun.scaled_lower_inc_gamma(-0.5, 1.0)


@pytest.mark.parametrize("n,s", [(1, -0.5), (2, 1.5), (5, -1.5), (7, 0.25)])
def test_pochhammer_ratio(n, s):
    assert specfun.pochhammer_ratio(n, s) == pytest.approx(float(mpmath.rf(n, s)), rel=1e-13)


def test_pochhammer_pole():
    with pytest.raises(specfun.SpecialFunctionError):
        specfun.pochhammer_ratio(1, -1.5)


def test_ln_gamma():
    assert specfun.ln_gamma(4.5) == pytest.approx(float(mpmath.loggamma(4.5)), rel=1e-14)
    with pytest.raises(specfun.SpecialFunctionError):
        specfun.ln_gamma(0.0)


def test_vectorised_matches_scalar():
    x = np.linspace(0.01, 5, 7)
    vec = specfun.lower_inc_gamma(-2 / 3, x)
    assert np.allclose(vec, [specfun.lower_inc_gamma(-2 / 3, xi) for xi in x], rtol=0, atol=0)
