"""Distribution and moments of the n-th dominant interference power.

Points of the power-axis process z_i = |x_i|^alpha / h_i form a PPP with
intensity measure Lambda_2(z) = c z^(2/alpha); z_n is its n-th smallest
point and I_n = 1 / z_n the n-th largest received power.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .model import FadingModel, NetworkModel, intensity_measure_2, power_axis_scale
from .specfun import DomainError


class MomentDoesNotExist(ArithmeticError):
    """Requested moment is infinite."""


def _check_rank(n: int) -> None:
    if int(n) != n or n < 1:
        raise ValueError(f"dominant rank must be a positive integer, got {n}")


def pdf_zn(net: NetworkModel, fading: FadingModel, n: int, z):
    """Density of z_n: 2 exp(-L) L^n / (alpha z (n-1)!), L = Lambda_2(z)."""
    _check_rank(n)
    za = np.asarray(z, dtype=float)
    if np.any(za <= 0):
        raise DomainError("z must be > 0")
    lam2 = intensity_measure_2(net, fading, za)
    log_pdf = math.log(2.0 / net.alpha) - lam2 + n * np.log(lam2) - np.log(za) - math.lgamma(n)
    out = np.exp(log_pdf)
    return out[()] if np.ndim(out) == 0 else out


def cdf_zn(net: NetworkModel, fading: FadingModel, n: int, z):
    """P(z_n <= z) = gamma(n, Lambda_2(z)) / Gamma(n)."""
    _check_rank(n)
    out = special.gammainc(n, intensity_measure_2(net, fading, z))
    return out[()] if np.ndim(out) == 0 else out


def cdf_In(net: NetworkModel, fading: FadingModel, n: int, x):
    """P(I_n <= x) = Gamma(n, Lambda_2(1/x)) / Gamma(n), via the z_n complement."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise DomainError("x must be > 0")
    out = 1.0 - cdf_zn(net, fading, n, 1.0 / xa)
    return out[()] if np.ndim(out) == 0 else out


def mode_zn(net: NetworkModel, fading: FadingModel, n: int) -> float:
    """Location of the density maximum of z_n, where Lambda_2(z) = n - alpha/2.

    For n <= alpha/2 the density is monotone decreasing in z and there is no
    interior mode.
    """
    _check_rank(n)
    level = n - net.alpha / 2.0
    if level <= 0:
        raise ValueError(f"density of z_{n} has no interior mode for alpha={net.alpha}")
    return (level / power_axis_scale(net, fading)) ** (net.alpha / 2.0)


def mean_In(net: NetworkModel, fading: FadingModel, n: int) -> float:
    """E[I_n] = c^(alpha/2) Gamma(n - alpha/2) / Gamma(n), finite only for n > alpha/2."""
    _check_rank(n)
    a = net.alpha / 2.0
    if n <= a:
        raise MomentDoesNotExist(f"E[I_{n}] diverges: need n > alpha/2 = {a}")
    c = power_axis_scale(net, fading)
    return c**a * math.exp(math.lgamma(n - a) - math.lgamma(n))


def mean_zn(net: NetworkModel, fading: FadingModel, n: int) -> float:
    """E[z_n] = c^(-alpha/2) Gamma(n + alpha/2) / Gamma(n)."""
    _check_rank(n)
    a = net.alpha / 2.0
    c = power_axis_scale(net, fading)
    return c ** (-a) * math.exp(math.lgamma(n + a) - math.lgamma(n))
