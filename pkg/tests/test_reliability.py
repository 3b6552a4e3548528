import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from domint import laplace, reliability
from domint.model import FadingModel, LinkModel, NetworkModel
from domint.reliability import QosSpec


@pytest.fixture
def link():
    return LinkModel(80.0, 1.0)


@pytest.fixture
def qos():
    return QosSpec(10.0, 0.05, 0.14)


def test_rayleigh_outage_is_one_minus_laplace(net, link):
    fad = FadingModel(1.0)
    sigma = link.u**net.alpha * link.eta
    for n in (1, 3):
        want = 1 - laplace.laplace_unconditional(net, fad, n, sigma)
        assert reliability.outage_probability(net, fad, link, n) == pytest.approx(want, rel=1e-10)


def test_m2_outage_by_finite_difference(net, fading, link):
    # P(success) = L(sigma) - sigma L'(sigma) with L' from central differences
    sigma = fading.m * link.u**net.alpha * link.eta / fading.omega
    h = 1e-4 * sigma
    L = lambda s: laplace.laplace_unconditional(net, fading, 1, s)  # noqa: E731
    slope = (L(sigma + h) - L(sigma - h)) / (2 * h)
    want = 1 - (L(sigma) - sigma * slope)
    assert reliability.outage_probability(net, fading, link, 1) == pytest.approx(want, rel=1e-6)


def test_outage_monotone_in_threshold_rank_and_angle(fading):
    etas = np.geomspace(0.01, 100, 9)
    net = NetworkModel(1e-4, 3.0, math.pi / 4)
    f1 = reliability.outage_curve(net, fading, 80.0, etas, 1)
    f3 = reliability.outage_curve(net, fading, 80.0, etas, 3)
    assert np.all(np.diff(f1) > 0) and np.all(f3 < f1)
    wide = NetworkModel(1e-4, 3.0, math.pi / 2)
    assert np.all(reliability.outage_curve(wide, fading, 80.0, etas, 1) > f1)


def test_non_integer_m_rejected(net, link):
    with pytest.raises(reliability.UnsupportedModelError):
        reliability.outage_probability(net, FadingModel(1.5), link, 1)


@given(theta=st.floats(1e-6, 30.0), lam_d=st.floats(0.01, 5.0))
def test_effective_bandwidth_inverse(theta, lam_d):
    r = reliability.effective_bandwidth(theta, lam_d)
    assert reliability.invert_effective_bandwidth(r, lam_d) == pytest.approx(theta, rel=1e-8, abs=1e-9)


def test_effective_bandwidth_limits():
    assert reliability.effective_bandwidth(1e-9, 0.14) == pytest.approx(0.14, rel=1e-8)
    theta = np.linspace(0.01, 5, 50)
    assert np.all(np.diff(reliability.effective_bandwidth(theta, 0.14)) > 0)
    with pytest.raises(reliability.InfeasibleRateError):
        reliability.invert_effective_bandwidth(0.14, 0.14)


def test_queue_violation_hits_target_at_minimum_rate(qos):
    r_min = reliability.effective_bandwidth(qos.theta_target, qos.lambda_d)
    assert reliability.queue_violation_prob(r_min, qos) == pytest.approx(qos.eps_target, rel=1e-10)


def test_bits_and_nats(net, fading, link):
    nats = reliability.link_error_prob(net, fading, link, 1, 0.5 * math.log(2))
    bits = reliability.link_error_prob(net, fading, link, 1, 0.5, base="bits")
    assert nats == pytest.approx(bits, rel=1e-12)
    with pytest.raises(ValueError):
        reliability.link_error_prob(net, fading, link, 1, 0.5, base="dits")


@given(a=st.floats(0, 1), b=st.floats(0, 1))
def test_combined_error_bounds(a, b):
    e = reliability.combine_errors(a, b)
    assert max(a, b) - 1e-15 <= e <= a + b + 1e-15


def test_total_error_falls_to_link_error(net, fading, link, qos):
    q = np.geomspace(1, 1e4, 40)
    curve = reliability.total_error_vs_qmax(net, fading, link, qos, 1, 0.3, q)
    assert np.all(np.diff(curve) <= 0)
    assert curve[-1] == pytest.approx(reliability.link_error_prob(net, fading, link, 1, 0.3), rel=1e-12)


def test_feasible_decision(net, fading, link, qos):
    d = reliability.qos_feasibility(net, fading, link, qos, 1)
    assert d.feasible and d.edge_condition
    eps_r = reliability.link_error_prob(net, fading, link, 1, d.r_star)
    assert reliability.queue_violation_prob(d.r_star, qos) == pytest.approx(eps_r, rel=1e-9)
    assert d.eps_inf == pytest.approx(1 - (1 - eps_r) ** 2, rel=1e-12)
    assert d.r_min < d.r_star
    assert d.eps_opt <= d.eps_inf <= qos.eps_target


def test_optimum_is_not_the_crossing(net, fading, link, qos):
    # the error-minimising rate differs from the crossing of the two error curves
    d = reliability.qos_feasibility(net, fading, link, qos, 1)
    assert d.r_opt > d.r_star
    assert d.eps_opt < reliability.total_error(net, fading, link, qos, 1, d.r_star)


def test_infeasible_when_target_too_strict(net, fading, link):
    d = reliability.qos_feasibility(net, fading, link, QosSpec(10.0, 1e-3, 0.14), 1)
    assert not d.feasible
    assert d.eps_opt > 1e-3


def test_edge_condition_fails_for_tiny_queue(net, fading, link):
    d = reliability.qos_feasibility(net, fading, link, QosSpec(0.5, 0.05, 0.14), 1)
    assert not d.edge_condition and not d.feasible and d.r_star is None


def test_qos_spec_validation():
    for args in ((0, 0.1, 0.1), (1, 0, 0.1), (1, 1.0, 0.1), (1, 0.1, 0)):
        with pytest.raises(ValueError):
            QosSpec(*args)
