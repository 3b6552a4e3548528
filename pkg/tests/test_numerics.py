import math

import numpy as np
import pytest

from domint import numerics


@pytest.mark.parametrize("order", [1, 2, 5])
def test_nodes_integrate_polynomials(order):
    t, w = numerics.gamma_nodes(order, 64)
    assert w.sum() == pytest.approx(1.0, rel=1e-13)
    for k in range(6):
        assert (t**k) @ w == pytest.approx(math.gamma(order + k) / math.gamma(order), rel=1e-12)


def test_smooth_expectation_uses_gauss_laguerre():
    res = numerics.gamma_expectation(lambda t: np.exp(-0.5 * t), 3.0)
    assert res.method == "gauss-laguerre" and res.converged
    assert res.value == pytest.approx(1.5**-3, rel=1e-12)


@pytest.mark.parametrize("order,power", [(1.0, -0.5), (2.0, -1.5), (1.0, 1 / 3)])
def test_singular_integrand_falls_back(order, power):
    res = numerics.gamma_expectation(lambda t: t**power, order)
    assert res.converged
    assert res.value == pytest.approx(math.gamma(order + power) / math.gamma(order), rel=1e-9)


def test_vector_valued_integrand():
    s = np.array([0.1, 1.0, 10.0])
    res = numerics.gamma_expectation(lambda t: np.exp(-s[:, None] * t), 2.0)
    assert np.allclose(res.value, (1 + s) ** -2.0, rtol=1e-10)


def test_non_convergence_is_reported():
    res = numerics.gamma_expectation(lambda t: np.sin(1e4 * t), 1.0)
    assert not res.converged


def test_find_root_and_bracket_error():
    assert numerics.find_root(lambda x: x**3 - 2, 0, 2) == pytest.approx(2 ** (1 / 3), rel=1e-14)
    with pytest.raises(numerics.BracketError):
        numerics.find_root(lambda x: x**2 + 1, -1, 1)


def test_minimize_scalar_interior_and_boundary():
    assert numerics.minimize_scalar(lambda x: (x - 0.3) ** 2, 0, 1) == pytest.approx(0.3, abs=1e-8)
    assert numerics.minimize_scalar(lambda x: x, 0.5, 2.0) == 0.5
    with pytest.raises(ValueError):
        numerics.minimize_scalar(lambda x: x, 1.0, 1.0)
