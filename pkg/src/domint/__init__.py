"""Dominant interference and partial accumulative interference in sectored PPP networks."""

from .laplace import (
    equivalent_exclusion_radius,
    laplace_conditional,
    laplace_derivative,
    laplace_unconditional,
    lower_bound,
    mean_partial_interference,
    upper_bound,
)
from .model import FadingModel, LinkModel, NetworkModel
from .order_stats import cdf_In, cdf_zn, mean_In, mean_zn, pdf_zn
from .reliability import (
    QosSpec,
    RateDecision,
    link_error_prob,
    optimize_rate,
    outage_probability,
    qos_feasibility,
    total_error,
)
from .simulator import SimConfig, simulate

__all__ = [
    "FadingModel",
    "LinkModel",
    "NetworkModel",
    "QosSpec",
    "RateDecision",
    "SimConfig",
    "cdf_In",
    "cdf_zn",
    "equivalent_exclusion_radius",
    "laplace_conditional",
    "laplace_derivative",
    "laplace_unconditional",
    "link_error_prob",
    "lower_bound",
    "mean_In",
    "mean_partial_interference",
    "mean_zn",
    "optimize_rate",
    "outage_probability",
    "pdf_zn",
    "qos_feasibility",
    "simulate",
    "total_error",
    "upper_bound",
]
