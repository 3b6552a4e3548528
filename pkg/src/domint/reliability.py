"""Outage probability and queue-constrained error probability.

Rates are in nats per channel use unless ``base="bits"`` is passed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .laplace import laplace_derivatives
from .model import FadingModel, LinkModel, NetworkModel
from .numerics import (
    PROBABILITY_ATOL,
    BracketError,
    NumericsError,
    find_root,
    gamma_weighted_expectation,
    minimize_scalar,
)
from .specfun import DomainError

R_HI_DEFAULT = 20.0
COARSE_SCAN_POINTS = 201
FEASIBILITY_TOL = 1e-12


class UnsupportedModelError(ValueError):
    """Closed form needs an integer Nakagami parameter."""


class InfeasibleRateError(ValueError):
    """Service rate does not exceed the mean arrival rate; the queue is unstable."""


@dataclass(frozen=True)
class QosSpec:
    """Queue bound ``q_max``, target total error ``eps_target``, Poisson arrival rate ``lambda_d``."""

    q_max: float
    eps_target: float
    lambda_d: float

    def __post_init__(self):
        if not self.q_max > 0:
            raise ValueError(f"q_max must be > 0, got {self.q_max}")
        if not 0 < self.eps_target < 1:
            raise ValueError(f"eps_target must lie in (0, 1), got {self.eps_target}")
        if not self.lambda_d > 0:
            raise ValueError(f"lambda_d must be > 0, got {self.lambda_d}")

    @property
    def theta_target(self) -> float:
        """QoS exponent at which the queue-violation probability equals eps_target."""
        return -math.log(self.eps_target) / self.q_max


@dataclass(frozen=True)
class RateDecision:
    feasible: bool
    r_star: float | None
    eps_inf: float
    r_opt: float
    eps_opt: float
    r_min: float
    edge_condition: bool


def _as_out(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def _integer_m(fading: FadingModel) -> int:
    if not float(fading.m).is_integer():
        raise UnsupportedModelError(f"outage closed form needs integer m, got {fading.m}")
    return int(fading.m)


def success_probability_given_zn(net: NetworkModel, fading: FadingModel, sigma, z_n):
    """P(SIR >= eta | z_n) = sum_k (-sigma)^k / k! L^(k)(sigma | z_n).

    ``sigma`` = m u^alpha eta / Omega. Every term is non-negative (the
    conditional functional is completely monotone), so the sum does not cancel.
    """
    m = _integer_m(fading)
    derivs = laplace_derivatives(net, fading, m - 1, sigma, z_n)
    sigma = np.asarray(sigma, dtype=float)
    total = np.zeros(np.broadcast(sigma, np.asarray(z_n)).shape)
    coef = np.ones_like(sigma)
    for k in range(m):
        if k:
            coef = coef * (-sigma) / k
        total = total + coef * derivs[k]
    return total


def outage_curve(net: NetworkModel, fading: FadingModel, u: float, etas, n: int):
    """Outage probability P(SIR < eta) for an array of thresholds."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    etas = np.atleast_1d(np.asarray(etas, dtype=float))
    if np.any(etas < 0):
        raise DomainError("eta must be >= 0")
    sigma = fading.m * u**net.alpha * etas / fading.omega
    res = gamma_weighted_expectation(
        lambda z: success_probability_given_zn(net, fading, sigma[:, None], z), n, net, fading, atol=PROBABILITY_ATOL
    )
    if not res.converged:
        raise NumericsError(f"outage quadrature did not converge (residual {res.abs_error_estimate:.3g})")
    return np.clip(1.0 - np.asarray(res.value), 0.0, 1.0)


def outage_probability(net: NetworkModel, fading: FadingModel, link: LinkModel, n: int) -> float:
    """P(h u^-alpha / I(n) < eta) with the n strongest interferers removed."""
    return float(outage_curve(net, fading, link.u, [link.eta], n)[0])


def effective_bandwidth(theta, lambda_d: float):
    """Effective bandwidth of Poisson arrivals: lambda_d (e^theta - 1) / theta."""
    theta = np.asarray(theta, dtype=float)
    if np.any(theta <= 0):
        raise DomainError("theta must be > 0")
    return _as_out(lambda_d * np.expm1(theta) / theta)


def invert_effective_bandwidth(r: float, lambda_d: float) -> float:
    """QoS exponent theta > 0 with effective_bandwidth(theta) = r."""
    if not r > lambda_d:
        raise InfeasibleRateError(f"rate {r} must exceed arrival rate {lambda_d}")

    def excess(theta):
        if theta == 0:
            return lambda_d - r
        return lambda_d * math.expm1(theta) / theta - r

    hi = 1.0
    while excess(hi) < 0:
        hi *= 2.0
    return find_root(excess, 0.0, hi, xtol=1e-15)


def queue_violation_prob(r, qos: QosSpec):
    """exp(-theta(r) Q_max), theta(r) the exponent whose effective bandwidth is r."""
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    theta = np.array([invert_effective_bandwidth(float(ri), qos.lambda_d) for ri in r_arr])
    out = np.exp(-theta * qos.q_max)
    return _as_out(out.reshape(np.shape(r)))


def _rate_to_threshold(r, base: str):
    if base == "nats":
        return np.expm1(r)
    if base == "bits":
        return np.exp2(r) - 1.0
    raise ValueError(f"base must be 'nats' or 'bits', got {base!r}")


def link_error_prob(net: NetworkModel, fading: FadingModel, link: LinkModel, n: int, r, base: str = "nats"):
    """P(log(1 + SIR) < r) = outage at threshold e^r - 1. ``link.eta`` is ignored."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise DomainError("rate must be >= 0")
    out = outage_curve(net, fading, link.u, _rate_to_threshold(r_arr.ravel(), base), n)
    return _as_out(out.reshape(r_arr.shape))


def combine_errors(eps_q, eps_r):
    """1 - (1 - eps_q)(1 - eps_r)."""
    return _as_out(np.asarray(eps_q) + np.asarray(eps_r) - np.asarray(eps_q) * np.asarray(eps_r))


def total_error(net, fading, link, qos: QosSpec, n: int, r, base: str = "nats"):
    """Error from either queue violation or a channel that cannot carry rate ``r``."""
    return combine_errors(queue_violation_prob(r, qos), link_error_prob(net, fading, link, n, r, base))


def total_error_vs_qmax(net, fading, link, qos: QosSpec, n: int, r: float, q_max_values, base: str = "nats"):
    """Total error at a fixed rate across queue bounds (the Q_max sweep)."""
    q = np.asarray(q_max_values, dtype=float)
    theta = invert_effective_bandwidth(r, qos.lambda_d)
    eps_q = np.exp(-theta * q)
    eps_r = float(link_error_prob(net, fading, link, n, r, base))
    return combine_errors(eps_q, eps_r)


def optimize_rate(
    net, fading, link, qos: QosSpec, n: int, r_hi: float = R_HI_DEFAULT, base: str = "nats"
) -> float:
    """Rate in (a(theta'), r_hi] minimising the total error.

    A coarse scan picks the best cell, then bounded Brent refines within the
    neighbouring cells.
    """
    r_min = float(effective_bandwidth(qos.theta_target, qos.lambda_d))
    if r_hi <= r_min:
        raise InfeasibleRateError(f"r_hi={r_hi} does not exceed the minimum stable rate {r_min}")
    # geometric in the distance from r_min: the optimum usually sits close to it
    span = r_hi - r_min
    grid = r_min + np.geomspace(1e-6 * span, span, COARSE_SCAN_POINTS - 1)
    errs = np.asarray(total_error(net, fading, link, qos, n, grid, base))
    i = int(np.argmin(errs))
    lo = grid[i - 1] if i > 0 else r_min + 1e-12 * max(1.0, r_min)
    hi = grid[min(i + 1, grid.size - 1)]

    def objective(r):
        return float(total_error(net, fading, link, qos, n, r, base))

    r_opt = minimize_scalar(objective, lo, hi) if hi > lo else float(grid[i])
    if r_opt >= r_hi * (1 - 1e-9):
        warnings.warn(f"total error still decreasing at the rate cap r_hi={r_hi}", RuntimeWarning, stacklevel=2)
    return r_opt


def qos_feasibility(
    net, fading, link, qos: QosSpec, n: int, r_hi: float = R_HI_DEFAULT, base: str = "nats"
) -> RateDecision:
    """Whether rate adaptation can meet ``qos``.

    Finds the crossing r* of the queue-violation and link-error curves above
    the minimum stable rate a(theta'). The target is reachable when
    eps_r(r*) <= 1 - sqrt(1 - eps_target); eps_inf reports 1 - (1 - eps_r(r*))^2.
    Without a crossing the verdict is infeasible and only the error-minimising
    rate is reported.
    """
    r_min = float(effective_bandwidth(qos.theta_target, qos.lambda_d))

    def eps_r(r):
        return float(link_error_prob(net, fading, link, n, r, base))

    def gap(r):
        return float(queue_violation_prob(r, qos)) - eps_r(r)

    edge = eps_r(r_min) <= qos.eps_target
    r_opt = optimize_rate(net, fading, link, qos, n, r_hi=r_hi, base=base)
    eps_opt = float(total_error(net, fading, link, qos, n, r_opt, base))

    r_star = None
    if edge:
        try:
            r_star = find_root(gap, r_min, r_hi, xtol=1e-13)
        except BracketError:
            r_star = None
    if r_star is None:
        return RateDecision(False, None, eps_opt, r_opt, eps_opt, r_min, edge)

    er = eps_r(r_star)
    feasible = er <= 1.0 - math.sqrt(1.0 - qos.eps_target) + FEASIBILITY_TOL
    eps_inf = 1.0 - (1.0 - er) ** 2
    return RateDecision(feasible, r_star, eps_inf, r_opt, eps_opt, r_min, edge)
