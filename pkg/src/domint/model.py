"""Network, fading and link parameter records plus the power-axis intensity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .specfun import DomainError


class ModelError(ValueError):
    """Parameter record violates its invariants."""


@dataclass(frozen=True)
class NetworkModel:
    """Homogeneous PPP with density ``lam`` seen through a sector of width ``phi``."""

    lam: float
    alpha: float
    phi: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ModelError(f"node density must be > 0, got {self.lam}")
        if not self.alpha > 2:
            raise ModelError(f"path-loss exponent must be > 2, got {self.alpha}")
        if not 0 < self.phi <= 2 * math.pi:
            raise ModelError(f"reception angle must lie in (0, 2pi], got {self.phi}")


@dataclass(frozen=True)
class FadingModel:
    """Nakagami-m power gain: Gamma(shape=m, scale=omega/m), mean omega.

    ``m = 1`` is Rayleigh fading.
    """

    m: float
    omega: float = 1.0

    def __post_init__(self):
        if not self.m > 0.5:
            raise ModelError(f"Nakagami m must be > 1/2, got {self.m}")
        if not self.omega > 0:
            raise ModelError(f"fading power must be > 0, got {self.omega}")

    @property
    def mean(self) -> float:
        return self.omega

    def pdf(self, h):
        m, om = self.m, self.omega
        h = np.asarray(h, dtype=float)
        log_pdf = m * math.log(m / om) + (m - 1) * np.log(h) - m * h / om - math.lgamma(m)
        return np.exp(log_pdf)

    def cdf(self, h):
        return special.gammainc(self.m, self.m * np.asarray(h, dtype=float) / self.omega)

    def sample(self, rng: np.random.Generator, size=None):
        return rng.gamma(self.m, self.omega / self.m, size)


@dataclass(frozen=True)
class LinkModel:
    """Desired link at distance ``u`` with SIR threshold ``eta``."""

    u: float
    eta: float = 1.0

    def __post_init__(self):
        if not self.u > 0:
            raise ModelError(f"link distance must be > 0, got {self.u}")
        if not self.eta > 0:
            raise ModelError(f"SIR threshold must be > 0, got {self.eta}")


def fractional_moment(fading: FadingModel, alpha: float) -> float:
    """E[h^(2/alpha)] of the Nakagami power gain."""
    if not alpha > 2:
        raise ModelError(f"alpha must be > 2, got {alpha}")
    p = 2.0 / alpha
    m = fading.m
    return (m / fading.omega) ** (-p) * math.exp(math.lgamma(m + p) - math.lgamma(m))


def power_axis_scale(net: NetworkModel, fading: FadingModel) -> float:
    """c = phi * lam * E[h^(2/alpha)] / 2, so that Lambda_2(z) = c z^(2/alpha)."""
    return 0.5 * net.phi * net.lam * fractional_moment(fading, net.alpha)


def _scalar_or_array(out):
    return out[()] if np.ndim(out) == 0 else out


def intensity_measure_2(net: NetworkModel, fading: FadingModel, z):
    """Expected number of points of the power-axis process in [0, z]."""
    za = np.asarray(z, dtype=float)
    if np.any(za < 0):
        raise DomainError("z must be >= 0")
    return _scalar_or_array(power_axis_scale(net, fading) * za ** (2.0 / net.alpha))


def intensity_density_2(net: NetworkModel, fading: FadingModel, z):
    """Derivative of :func:`intensity_measure_2` in z."""
    za = np.asarray(z, dtype=float)
    if np.any(za <= 0):
        raise DomainError("z must be > 0")
    c = power_axis_scale(net, fading)
    return _scalar_or_array((2.0 * c / net.alpha) * za ** (2.0 / net.alpha - 1.0))


def inverse_intensity_measure_2(net: NetworkModel, fading: FadingModel, t):
    """The z at which the power-axis intensity measure reaches ``t``."""
    ta = np.asarray(t, dtype=float)
    if np.any(ta < 0):
        raise DomainError("t must be >= 0")
    return _scalar_or_array((ta / power_axis_scale(net, fading)) ** (net.alpha / 2.0))
