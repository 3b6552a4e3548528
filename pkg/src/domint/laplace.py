"""Laplace functional of the partial accumulative interference.

The partial interference I(n) sums every received power except the n
strongest. Conditioned on z_n (the inverse of the n-th strongest power),
its Laplace transform is exp(kappa * q(s, z_n)) with
kappa = phi * lam * E[h^(2/alpha)] / alpha. Unconditional values and the
Jensen-type bounds average over z_n by Gamma-substitution quadrature.
"""

from __future__ import annotations

import math
import warnings
from math import comb

import numpy as np

from .model import FadingModel, NetworkModel, power_axis_scale
from .numerics import PROBABILITY_ATOL, NumericsError, QuadratureResult, gamma_weighted_expectation
from .order_stats import mean_zn
from .specfun import DomainError, lower_inc_gamma, pochhammer_ratio, scaled_lower_inc_gamma

M_MAX = 8
LAMBDA_DENSE = 1e-3


class UnsupportedOrderError(ValueError):
    """Derivative order beyond the configured cap."""


class RegimeWarning(UserWarning):
    """Bound evaluated outside the regime where it has been checked."""


def _out(x):
    return x[()] if np.ndim(x) == 0 else x


def exponent_scale(net: NetworkModel, fading: FadingModel) -> float:
    """kappa = phi * lam * E[h^(2/alpha)] / alpha."""
    return 2.0 * power_axis_scale(net, fading) / net.alpha


def _check_sz(s, z_n):
    s = np.asarray(s, dtype=float)
    z_n = np.asarray(z_n, dtype=float)
    if np.any(s < 0):
        raise DomainError("s must be >= 0")
    if np.any(z_n <= 0):
        raise DomainError("z_n must be > 0")
    return s, z_n


def q_zn(alpha: float, s, z_n):
    """q(s) = s^(2/alpha) gamma(-2/alpha, s/z_n) + (alpha/2) z_n^(2/alpha).

    Evaluated through the recurrence to gamma(1 - 2/alpha, .), written as
    (alpha/2) z_n^(2/alpha) [1 - e^-x - x * x^-a gamma(a, x)] with
    x = s/z_n and a = 1 - 2/alpha, which is exactly 0 at s = 0.
    Broadcasts over ``s`` and ``z_n``.
    """
    s, z_n = _check_sz(s, z_n)
    p = 2.0 / alpha
    x = s / z_n
    bracket = -np.expm1(-x) - x * scaled_lower_inc_gamma(1.0 - p, x)
    return _out(0.5 * alpha * z_n**p * bracket)


def q_zn_direct(alpha: float, s, z_n):
    """Same as :func:`q_zn` but through the continued gamma(-2/alpha, .) literally."""
    s, z_n = _check_sz(s, z_n)
    if np.any(s == 0):
        raise DomainError("direct form needs s > 0")
    p = 2.0 / alpha
    return _out(s**p * lower_inc_gamma(-p, s / z_n) + 0.5 * alpha * z_n**p)


def laplace_conditional(net: NetworkModel, fading: FadingModel, s, z_n):
    """E[exp(-s I(n)) | z_n]; broadcasts over ``s`` and ``z_n``."""
    return _out(np.exp(exponent_scale(net, fading) * q_zn(net.alpha, s, z_n)))


def g_derivative(net: NetworkModel, fading: FadingModel, k: int, s, z_n):
    """k-th s-derivative of the log Laplace functional, k >= 1.

    g^(k)(s) = (-1)^k kappa s^(2/alpha - k) gamma(k - 2/alpha, s/z_n)
             = (-1)^k kappa z_n^(2/alpha - k) x^-a gamma(a, x),  a = k - 2/alpha.
    The second form is finite at s = 0, where x^-a gamma(a, x) -> 1/a.
    """
    if k < 1:
        raise ValueError(f"derivative order must be >= 1, got {k}")
    s, z_n = _check_sz(s, z_n)
    p = 2.0 / net.alpha
    a = k - p
    val = exponent_scale(net, fading) * z_n ** (p - k) * scaled_lower_inc_gamma(a, s / z_n)
    return _out(val if k % 2 == 0 else -val)


def laplace_derivatives(net: NetworkModel, fading: FadingModel, k_max: int, s, z_n, m_max: int = M_MAX):
    """[L, L', ..., L^(k_max)] of the conditional Laplace functional.

    Uses L^(k+1) = sum_j C(k, j) g^(j+1) L^(k-j).
    """
    if k_max > m_max:
        raise UnsupportedOrderError(f"order {k_max} exceeds cap {m_max}")
    if k_max < 0:
        raise ValueError("order must be >= 0")
    s, z_n = np.broadcast_arrays(*_check_sz(s, z_n))
    g = [None] + [np.asarray(g_derivative(net, fading, j, s, z_n)) for j in range(1, k_max + 1)]
    out = [np.asarray(laplace_conditional(net, fading, s, z_n))]
    for k in range(k_max):
        out.append(sum(comb(k, j) * g[j + 1] * out[k - j] for j in range(k + 1)))
    return out


def laplace_derivative(net: NetworkModel, fading: FadingModel, k: int, s, z_n, m_max: int = M_MAX):
    """k-th s-derivative of the conditional Laplace functional."""
    return _out(laplace_derivatives(net, fading, k, s, z_n, m_max=m_max)[k])


def conditional_mean_partial_interference(net: NetworkModel, fading: FadingModel, z_n):
    """E[I(n) | z_n] = (phi lam E[h^(2/alpha)] / (alpha - 2)) z_n^(2/alpha - 1)."""
    z_n = np.asarray(z_n, dtype=float)
    c = power_axis_scale(net, fading)
    return _out(2.0 * c / (net.alpha - 2.0) * z_n ** (2.0 / net.alpha - 1.0))


def mean_partial_interference(net: NetworkModel, fading: FadingModel, n: int) -> float:
    """E[I(n)] = 2/(alpha-2) c^(alpha/2) Gamma(n + 1 - alpha/2) / Gamma(n)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    a = net.alpha / 2.0
    c = power_axis_scale(net, fading)
    return 2.0 / (net.alpha - 2.0) * c**a * pochhammer_ratio(n, 1.0 - a)


def _expect(f, n, net, fading, atol=0.0) -> QuadratureResult:
    res = gamma_weighted_expectation(f, n, net, fading, atol=atol)
    if not res.converged:
        raise NumericsError(
            f"quadrature over z_{n} did not converge (residual estimate {res.abs_error_estimate:.3g})"
        )
    return res


def laplace_unconditional(net: NetworkModel, fading: FadingModel, n: int, s) -> float:
    """E[exp(-s I(n))], averaging the conditional functional over z_n."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    res = _expect(
        lambda z: laplace_conditional(net, fading, s_arr[:, None], z), n, net, fading, atol=PROBABILITY_ATOL
    )
    return _out(np.asarray(res.value).reshape(np.shape(s)))


def lower_bound(net: NetworkModel, fading: FadingModel, n: int, s) -> float:
    """Jensen lower bound exp(kappa E[q(s, z_n)]).

    Equal to exp(n + kappa s^(2/alpha) E[gamma(-2/alpha, s/z_n)]) because
    E[Lambda_2(z_n)] = n; the q form avoids cancelling those two terms.
    """
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    res = _expect(lambda z: q_zn(net.alpha, s_arr[:, None], z), n, net, fading)
    val = np.exp(exponent_scale(net, fading) * np.asarray(res.value))
    return _out(val.reshape(np.shape(s)))


def upper_bound(net: NetworkModel, fading: FadingModel, n: int, s, lambda_dense: float = LAMBDA_DENSE):
    """exp(kappa q(s, E[z_n])), the conditional functional at the mean of z_n.

    Bounds the unconditional value from above only where the conditional
    functional is concave in z_n over the mass of z_n; checked for sparse
    networks (lam <= ``lambda_dense``), a RegimeWarning is issued otherwise.
    """
    if net.lam > lambda_dense:
        warnings.warn(
            f"upper bound unverified for lam={net.lam} > {lambda_dense}", RegimeWarning, stacklevel=2
        )
    return laplace_conditional(net, fading, s, mean_zn(net, fading, n))


def laplace_z_second_derivative(net: NetworkModel, fading: FadingModel, s, z_n):
    """d^2/dz_n^2 of the conditional functional, in closed form.

    L * kappa * (kappa q'^2 + q'') with q' = (1 - e^-x) z^(2/alpha - 1) and
    q'' = z^(2/alpha - 2) [-x e^-x - (1 - 2/alpha)(1 - e^-x)], x = s/z.
    """
    s, z_n = _check_sz(s, z_n)
    p = 2.0 / net.alpha
    kappa = exponent_scale(net, fading)
    x = s / z_n
    one_minus = -np.expm1(-x)
    dq = one_minus * z_n ** (p - 1.0)
    d2q = z_n ** (p - 2.0) * (-x * np.exp(-x) - (1.0 - p) * one_minus)
    L = np.exp(kappa * q_zn(net.alpha, s, z_n))
    return _out(L * kappa * (kappa * dq**2 + d2q))


def omni_excluded_mean(net: NetworkModel, fading: FadingModel, radius: float) -> float:
    """Mean omni-directional interference from nodes outside the disc of ``radius``."""
    return 2.0 * math.pi * net.lam * fading.omega * radius ** (2.0 - net.alpha) / (net.alpha - 2.0)


def equivalent_exclusion_radius(net: NetworkModel, fading: FadingModel, n: int) -> float:
    """Radius R whose omni-directional exclusion disc leaves mean interference E[I(n)].

    Solves 2 pi lam Omega R^(2-alpha) / (alpha-2) = E[I(n)], giving
    R = (c/lam)^(alpha/(2(2-alpha))) ((n)_{1-alpha/2} / (pi Omega))^(1/(2-alpha)) lam^(-1/2)
    with c/lam = phi E[h^(2/alpha)] / 2.
    """
    target = mean_partial_interference(net, fading, n)
    return ((net.alpha - 2.0) * target / (2.0 * math.pi * net.lam * fading.omega)) ** (
        1.0 / (2.0 - net.alpha)
    )
