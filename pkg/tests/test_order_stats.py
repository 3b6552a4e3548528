import math

import numpy as np
import pytest
from scipy import integrate

from domint import order_stats
from domint.model import FadingModel, NetworkModel, power_axis_scale
from domint.specfun import DomainError


def _log_quad(f, centre):
    """Integral over z > 0 of f, done in u = log z."""
    c = math.log(centre)
    return integrate.quad(lambda u: f(math.exp(u)) * math.exp(u), c - 60, c + 12, points=[c], limit=400, epsabs=0, epsrel=1e-12)[0]


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
@pytest.mark.parametrize("alpha", [2.5, 3.0, 4.0])
def test_pdf_normalised(n, alpha):
    net, fad = NetworkModel(1e-4, alpha, math.pi / 4), FadingModel(2.0)
    total = _log_quad(lambda z: order_stats.pdf_zn(net, fad, n, z), order_stats.mean_zn(net, fad, n))
    assert total == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_cdf_is_integral_of_pdf(net, fading, n):
    zbar = order_stats.mean_zn(net, fading, n)
    for z in (0.1 * zbar, zbar, 4 * zbar):
        part = integrate.quad(lambda u: order_stats.pdf_zn(net, fading, n, math.exp(u)) * math.exp(u),
                              math.log(zbar) - 60, math.log(z), limit=400, epsabs=0, epsrel=1e-12)[0]
        assert order_stats.cdf_zn(net, fading, n, z) == pytest.approx(part, rel=1e-8)


def test_cdf_In_complements_cdf_zn(net, fading):
    x = np.geomspace(1e-9, 1e-4, 11)
    assert np.allclose(order_stats.cdf_In(net, fading, 2, x), 1 - order_stats.cdf_zn(net, fading, 2, 1 / x))
    assert np.all(np.diff(order_stats.cdf_In(net, fading, 2, x)) >= 0)


def test_dominant_powers_are_ordered(net, fading):
    # I_1 >= I_2 >= ... so F_{I_1} <= F_{I_2} <= ... pointwise
    x = np.geomspace(1e-9, 1e-4, 25)
    cdfs = np.array([order_stats.cdf_In(net, fading, n, x) for n in range(1, 6)])
    assert np.all(np.diff(cdfs, axis=0) >= 0)


@pytest.mark.parametrize("n", [2, 3, 6])
def test_mean_In_by_quadrature(net, fading, n):
    zbar = order_stats.mean_zn(net, fading, n)
    want = _log_quad(lambda z: order_stats.pdf_zn(net, fading, n, z) / z, zbar)
    assert order_stats.mean_In(net, fading, n) == pytest.approx(want, rel=1e-8)


@pytest.mark.parametrize("n", [1, 2, 4])
def test_mean_zn_by_quadrature(net, fading, n):
    zbar = order_stats.mean_zn(net, fading, n)
    want = _log_quad(lambda z: order_stats.pdf_zn(net, fading, n, z) * z, zbar)
    assert zbar == pytest.approx(want, rel=1e-8)


def test_mean_In_diverges_for_small_rank(net, fading):
    with pytest.raises(order_stats.MomentDoesNotExist):
        order_stats.mean_In(net, fading, 1)
    with pytest.raises(order_stats.MomentDoesNotExist):
        order_stats.mean_In(NetworkModel(1e-4, 4.0, 1.0), fading, 2)


@pytest.mark.parametrize("n", [2, 3, 6])
def test_mode_is_density_maximum(net, fading, n):
    mode = order_stats.mode_zn(net, fading, n)
    near = order_stats.pdf_zn(net, fading, n, mode * np.array([0.999, 1.0, 1.001]))
    assert near[1] > near[0] and near[1] > near[2]
    c = power_axis_scale(net, fading)
    assert c * mode ** (2 / net.alpha) == pytest.approx(n - net.alpha / 2)


def test_no_interior_mode_for_first_rank(net, fading):
    with pytest.raises(ValueError):
        order_stats.mode_zn(net, fading, 1)


def test_invalid_inputs(net, fading):
    with pytest.raises(ValueError):
        order_stats.pdf_zn(net, fading, 0, 1.0)
    with pytest.raises(DomainError):
        order_stats.pdf_zn(net, fading, 1, 0.0)
    with pytest.raises(DomainError):
        order_stats.cdf_In(net, fading, 1, -1.0)
