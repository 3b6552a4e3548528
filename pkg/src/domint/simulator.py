"""Monte Carlo oracle: sampled PPP sectors with Nakagami fading.

Every trial draws from its own Philox stream keyed by (seed, trial index),
so results do not depend on how trials are split across workers.

Moments of the few strongest powers can have infinite variance (E[I_2^2]
diverges at alpha = 3), which makes plain sample means converge very
slowly. With ``importance_radius`` set, radii inside that disc are drawn
from a density proportional to r^gamma (gamma = ``importance_exponent``)
instead of r, and each trial carries the likelihood ratio as a weight.
All estimators below are weighted and stay unbiased; sample means also
use the weight as a control variate (its mean is exactly 1).

The infinite PPP is truncated to a disc of radius R. Partial sums get the
Campbell mean of everything beyond R added back (``far_field``); the tail
is a sum of very many tiny terms, so its fluctuation is negligible next to
its mean.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .laplace import mean_partial_interference
from .model import FadingModel, LinkModel, NetworkModel

DEFAULT_TAIL_TOLERANCE = 1e-2
MAX_CENSORED_FRACTION = 0.01
Z95 = 1.959963984540054


class WindowTooSmallError(RuntimeError):
    """Too many trials had fewer points in the window than the requested rank."""


@dataclass(frozen=True)
class SimConfig:
    """Truncation window (radius or tail tolerance), trial count and master seed."""

    trials: int = 100_000
    seed: int = 0
    window_radius: float | None = None
    tail_tolerance: float | None = DEFAULT_TAIL_TOLERANCE
    far_field: bool = True
    workers: int = 1
    max_rank: int = 8
    importance_radius: float | None = None
    importance_exponent: float = -0.15

    def __post_init__(self):
        if (self.window_radius is None) == (self.tail_tolerance is None):
            raise ValueError("set exactly one of window_radius and tail_tolerance")
        if self.window_radius is not None and not self.window_radius > 0:
            raise ValueError("window_radius must be > 0")
        if self.tail_tolerance is not None and not self.tail_tolerance > 0:
            raise ValueError("tail_tolerance must be > 0")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.workers < 1 or self.max_rank < 1:
            raise ValueError("workers and max_rank must be >= 1")
        if self.importance_radius is not None and not self.importance_radius > 0:
            raise ValueError("importance_radius must be > 0")
        if not -1 < self.importance_exponent <= 1:
            raise ValueError("importance_exponent must lie in (-1, 1]")

    def radius(self, net: NetworkModel, fading: FadingModel) -> float:
        if self.window_radius is not None:
            return self.window_radius
        return window_radius_for_tolerance(net, fading, self.tail_tolerance)


@dataclass(frozen=True)
class NetworkRealization:
    """One sampled sector: sorted powers and distances plus per-point gains.

    ``gains`` and ``angles`` are aligned with ``distances_asc``.
    """

    powers_desc: np.ndarray
    distances_asc: np.ndarray
    gains: np.ndarray
    angles: np.ndarray
    signal_gain: float


@dataclass(frozen=True)
class MeanEstimate:
    mean: float
    half_width: float
    std: float
    trials: int

    @property
    def ci(self) -> tuple[float, float]:
        return self.mean - self.half_width, self.mean + self.half_width

    def contains(self, value: float) -> bool:
        lo, hi = self.ci
        return lo <= value <= hi


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted samples with optional importance weights, plus the censored count."""

    samples: np.ndarray
    censored: int
    trials: int
    weights: np.ndarray | None = None

    @classmethod
    def from_samples(cls, x, censored=0, trials=None, weights=None):
        x = np.asarray(x, dtype=float)
        order = np.argsort(x, kind="stable")
        w = None if weights is None else np.asarray(weights, dtype=float)[order]
        return cls(x[order], censored, x.size + censored if trials is None else trials, w)

    def _cum(self) -> np.ndarray:
        if self.weights is None:
            return np.arange(1, self.samples.size + 1) / self.samples.size
        cw = np.cumsum(self.weights)
        return cw / cw[-1]

    def cdf(self, x):
        idx = np.searchsorted(self.samples, x, side="right")
        cum = np.concatenate([[0.0], self._cum()])
        return cum[idx]

    def sup_distance(self, cdf) -> float:
        """Kolmogorov distance to a continuous CDF given as a callable."""
        F = np.asarray(cdf(self.samples), dtype=float)
        after = self._cum()
        before = np.concatenate([[0.0], after[:-1]])
        return float(max(np.max(after - F), np.max(F - before)))

    def sup_distance_to(self, other: "EmpiricalDistribution") -> float:
        grid = np.concatenate([self.samples, other.samples])
        return float(np.max(np.abs(self.cdf(grid) - other.cdf(grid))))


@dataclass
class TrialSummary:
    """Per-trial statistics from one batch of realizations.

    ``top`` holds the ``max_rank`` largest powers (descending) and
    ``nearest`` the powers of the ``max_rank`` closest points, NaN-padded
    when a trial has fewer points. ``total`` is the sum of all powers,
    far-field mean included.
    """

    top: np.ndarray
    nearest: np.ndarray
    total: np.ndarray
    count: np.ndarray
    signal_gain: np.ndarray
    weight: np.ndarray
    radius: float
    inner_radius: float = 0.0
    far_field_mean: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def trials(self) -> int:
        return self.total.size

    def _valid(self, n: int) -> np.ndarray:
        if n > self.top.shape[1]:
            raise ValueError(f"rank {n} exceeds recorded max_rank {self.top.shape[1]}")
        valid = self.count >= n
        censored = int(self.trials - valid.sum())
        if censored > MAX_CENSORED_FRACTION * self.trials:
            raise WindowTooSmallError(f"{censored} of {self.trials} trials have fewer than {n} points")
        return valid

    def partial_sums(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Total power minus the n largest, with weights, for uncensored trials."""
        if n == 0:
            return self.total.copy(), self.weight.copy()
        valid = self._valid(n)
        return self.total[valid] - self.top[valid, :n].sum(axis=1), self.weight[valid]

    def ranked(self, n: int, nearest: bool = False) -> tuple[np.ndarray, np.ndarray]:
        """n-th strongest (or n-th nearest) power and weight for uncensored trials."""
        valid = self._valid(n)
        src = self.nearest if nearest else self.top
        return src[valid, n - 1], self.weight[valid]


def window_radius_for_tolerance(net: NetworkModel, fading: FadingModel, tol: float) -> float:
    """Smallest R whose beyond-R mean interference is <= tol * E[I(1)].

    The sector mean beyond R is phi lam Omega R^(2-alpha) / (alpha - 2).
    """
    if not tol > 0:
        raise ValueError("tolerance must be > 0")
    target = tol * mean_partial_interference(net, fading, 1)
    return (net.phi * net.lam * fading.omega / ((net.alpha - 2.0) * target)) ** (1.0 / (net.alpha - 2.0))


def importance_radius(net: NetworkModel, mean_count: float = 1.0) -> float:
    """Radius of the sector disc holding ``mean_count`` nodes on average."""
    return math.sqrt(2.0 * mean_count / (net.lam * net.phi))


def far_field_mean(net: NetworkModel, fading: FadingModel, radius: float) -> float:
    return net.phi * net.lam * fading.omega * radius ** (2.0 - net.alpha) / (net.alpha - 2.0)


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    """Independent counter-based stream for one trial."""
    return np.random.Generator(np.random.Philox(key=(trial_index << 64) | seed))


def _uniform_radii(rng, count, r_lo, r_hi):
    return np.sqrt(r_lo**2 + rng.random(count) * (r_hi**2 - r_lo**2))


def _draw(net, fading, radius, inner_radius, rng, is_radius=None, is_exponent=-0.5):
    """Radii, angles, gains, signal gain and log likelihood ratio of one trial."""
    log_w = 0.0
    if is_radius is None:
        count = rng.poisson(0.5 * net.lam * net.phi * (radius**2 - inner_radius**2))
        r = _uniform_radii(rng, count, inner_radius, radius)
    else:
        rho = is_radius
        k_in = rng.poisson(0.5 * net.lam * net.phi * rho**2)
        # proposal density (g+1) r^g / rho^(g+1) against the uniform-area 2r / rho^2
        r_in = rho * rng.random(k_in) ** (1.0 / (is_exponent + 1.0))
        log_w = float(np.sum(np.log(2.0 / (is_exponent + 1.0)) + (1.0 - is_exponent) * np.log(r_in / rho)))
        k_out = rng.poisson(0.5 * net.lam * net.phi * (radius**2 - rho**2))
        r = np.concatenate([r_in, _uniform_radii(rng, k_out, rho, radius)])
        count = r.size
    theta = net.phi * rng.random(count)
    gains = fading.sample(rng, count)
    signal = float(fading.sample(rng))
    return r, theta, gains, signal, log_w


def _is_args(config: SimConfig, radius: float, inner_radius: float):
    if config.importance_radius is None:
        return None, config.importance_exponent
    if inner_radius > 0:
        raise ValueError("importance sampling needs inner_radius = 0")
    if config.importance_radius >= radius:
        raise ValueError("importance_radius must be smaller than the window radius")
    return config.importance_radius, config.importance_exponent


def sample_realization(
    net: NetworkModel, fading: FadingModel, config: SimConfig, trial_index: int, inner_radius: float = 0.0
) -> NetworkRealization:
    """The full point set of one trial (same draws as :func:`simulate` uses)."""
    radius = config.radius(net, fading)
    r, theta, gains, signal, _ = _draw(
        net, fading, radius, inner_radius, trial_rng(config.seed, trial_index), *_is_args(config, radius, inner_radius)
    )
    order = np.argsort(r)
    r, theta, gains = r[order], theta[order], gains[order]
    powers = np.sort(gains * r ** (-net.alpha))[::-1]
    return NetworkRealization(powers, r, gains, theta, signal)


def _top_desc(values: np.ndarray, k: int) -> np.ndarray:
    out = np.full(k, np.nan)
    if values.size == 0:
        return out
    if values.size > k:
        values = values[np.argpartition(values, values.size - k)[values.size - k :]]
    top = np.sort(values)[::-1]
    out[: top.size] = top
    return out


def _nearest_powers(r: np.ndarray, powers: np.ndarray, k: int) -> np.ndarray:
    out = np.full(k, np.nan)
    if r.size == 0:
        return out
    idx = np.argpartition(r, k - 1)[:k] if r.size > k else np.arange(r.size)
    idx = idx[np.argsort(r[idx])]
    out[: idx.size] = powers[idx]
    return out


def _run_block(args):
    net, fading, radius, inner_radius, k, seed, start, stop, is_radius, is_exponent = args
    size = stop - start
    top = np.empty((size, k))
    nearest = np.empty((size, k))
    total = np.empty(size)
    count = np.empty(size, dtype=np.int64)
    signal = np.empty(size)
    log_w = np.empty(size)
    for j, i in enumerate(range(start, stop)):
        r, _, gains, sig, log_w[j] = _draw(
            net, fading, radius, inner_radius, trial_rng(seed, i), is_radius, is_exponent
        )
        powers = gains * r ** (-net.alpha)
        top[j] = _top_desc(powers, k)
        nearest[j] = _nearest_powers(r, powers, k)
        total[j] = powers.sum()
        count[j] = r.size
        signal[j] = sig
    return top, nearest, total, count, signal, np.exp(log_w)


def simulate(
    net: NetworkModel, fading: FadingModel, config: SimConfig, inner_radius: float = 0.0
) -> TrialSummary:
    """Run ``config.trials`` independent realizations and keep per-trial statistics.

    ``inner_radius`` > 0 removes every node inside that disc (exclusion zone).
    """
    radius = config.radius(net, fading)
    if not radius > inner_radius:
        raise ValueError(f"window radius {radius} must exceed inner radius {inner_radius}")
    k = config.max_rank
    is_args = _is_args(config, radius, inner_radius)
    n_blocks = max(config.workers * 4, 1) if config.workers > 1 else 1
    edges = np.linspace(0, config.trials, n_blocks + 1).astype(int)
    jobs = [
        (net, fading, radius, inner_radius, k, config.seed, int(a), int(b), *is_args)
        for a, b in zip(edges[:-1], edges[1:])
        if b > a
    ]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(_run_block, jobs))
    else:
        parts = [_run_block(job) for job in jobs]
    top, nearest, total, count, signal, weight = (np.concatenate(p) for p in zip(*parts))
    tail = far_field_mean(net, fading, radius) if config.far_field else 0.0
    return TrialSummary(
        top=top,
        nearest=nearest,
        total=total + tail,
        count=count,
        signal_gain=signal,
        weight=weight,
        radius=radius,
        inner_radius=inner_radius,
        far_field_mean=tail,
        meta={
            "seed": config.seed,
            "lam": net.lam,
            "alpha": net.alpha,
            "phi": net.phi,
            "m": fading.m,
            "importance_radius": is_args[0],
        },
    )


def _mean_estimate(x, w=None) -> MeanEstimate:
    x = np.asarray(x, dtype=float)
    y = x
    if w is not None and np.ptp(w) > 0:
        cov = np.cov(w * x, w)
        y = w * x - cov[0, 1] / cov[1, 1] * (w - 1.0)
    std = float(y.std(ddof=1)) if y.size > 1 else 0.0
    return MeanEstimate(float(y.mean()), Z95 * std / math.sqrt(y.size), std, y.size)


def _ratio_estimate(x, w) -> MeanEstimate:
    """Self-normalised weighted mean with a delta-method interval."""
    x, w = np.asarray(x, dtype=float), np.asarray(w, dtype=float)
    mu = float(np.sum(w * x) / np.sum(w))
    se = math.sqrt(float(np.sum((w * (x - mu)) ** 2))) / float(np.sum(w))
    return MeanEstimate(mu, Z95 * se, se * math.sqrt(x.size), x.size)


def _summary(net, fading, config, summary):
    return summary if summary is not None else simulate(net, fading, config)


def _is_weighted(s: TrialSummary) -> bool:
    return s.meta.get("importance_radius") is not None


def _distribution(s: TrialSummary, n: int, nearest: bool) -> EmpiricalDistribution:
    x, w = s.ranked(n, nearest)
    return EmpiricalDistribution.from_samples(
        x, censored=s.trials - x.size, trials=s.trials, weights=w if _is_weighted(s) else None
    )


def empirical_cdf_In(net, fading, config, n: int, summary: TrialSummary | None = None) -> EmpiricalDistribution:
    """ECDF of the n-th largest received power."""
    return _distribution(_summary(net, fading, config, summary), n, nearest=False)


def empirical_cdf_nth_nearest_power(
    net, fading, config, n: int, summary: TrialSummary | None = None
) -> EmpiricalDistribution:
    """ECDF of the power received from the n-th closest node."""
    return _distribution(_summary(net, fading, config, summary), n, nearest=True)


def empirical_mean_In(net, fading, config, n: int, summary: TrialSummary | None = None) -> MeanEstimate:
    return _mean_estimate(*_summary(net, fading, config, summary).ranked(n))


def empirical_partial_sum(net, fading, config, n: int, summary: TrialSummary | None = None) -> MeanEstimate:
    """Mean of the interference left after removing the n strongest nodes."""
    return _mean_estimate(*_summary(net, fading, config, summary).partial_sums(n))


def empirical_laplace(net, fading, config, n: int, s_arg: float, summary: TrialSummary | None = None) -> MeanEstimate:
    """Sample mean of exp(-s I(n))."""
    if s_arg < 0:
        raise ValueError("s must be >= 0")
    x, w = _summary(net, fading, config, summary).partial_sums(n)
    return _mean_estimate(np.exp(-s_arg * x), w)


def empirical_conditional_laplace(
    net, fading, config, n: int, s_arg: float, z_target: float, rel_bin: float = 0.05,
    summary: TrialSummary | None = None,
) -> tuple[MeanEstimate, np.ndarray, np.ndarray]:
    """exp(-s I(n)) averaged over trials whose z_n lies within +-rel_bin of ``z_target``.

    Also returns the z_n values and weights of the trials in the bin, so the
    analytic side can be averaged over the same bin.
    """
    s = _summary(net, fading, config, summary)
    top, w = s.ranked(n)
    partial, _ = s.partial_sums(n)
    z = 1.0 / top
    in_bin = np.abs(z / z_target - 1.0) <= rel_bin
    if not in_bin.any():
        raise WindowTooSmallError("no trial fell in the conditioning bin")
    est = _ratio_estimate(np.exp(-s_arg * partial[in_bin]), w[in_bin])
    return est, z[in_bin], w[in_bin]


def empirical_outage(
    net, fading, link: LinkModel, config, n: int, summary: TrialSummary | None = None
) -> MeanEstimate:
    """Frequency of h u^-alpha / I(n) < eta with an independent signal gain per trial."""
    s = _summary(net, fading, config, summary)
    valid = s._valid(n) if n > 0 else np.ones(s.trials, dtype=bool)
    partial, w = s.partial_sums(n)
    sir_fail = s.signal_gain[valid] * link.u ** (-net.alpha) < link.eta * partial
    return _mean_estimate(sir_fail.astype(float), w)


def empirical_exclusion_sum(
    net: NetworkModel, fading: FadingModel, config: SimConfig, exclusion_radius: float
) -> MeanEstimate:
    """Mean interference from nodes outside a disc of ``exclusion_radius``, nothing else removed."""
    s = simulate(net, fading, config, inner_radius=exclusion_radius)
    return _mean_estimate(s.total)


def dump_samples(runs, path) -> None:
    """Write one headered CSV record per trial.

    ``runs`` is a sequence of (labels, summary) pairs; the label keys become
    leading columns so several simulations can share one file.
    """
    runs = list(runs)
    if not runs:
        raise ValueError("nothing to dump")
    label_keys = list(runs[0][0])
    k = runs[0][1].top.shape[1]
    header = (
        label_keys
        + ["trial", "count", "total_power", "signal_gain", "weight"]
        + [f"top_{i}" for i in range(1, k + 1)]
        + [f"nearest_{i}" for i in range(1, k + 1)]
    )
    fmt = "{:.12g}".format
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for labels, summary in runs:
            lead = [v if isinstance(v, str) else fmt(v) for v in labels.values()]
            for i in range(summary.trials):
                w.writerow(
                    lead
                    + [i, int(summary.count[i]), fmt(summary.total[i]), fmt(summary.signal_gain[i]), fmt(summary.weight[i])]
                    + [fmt(v) for v in summary.top[i]]
                    + [fmt(v) for v in summary.nearest[i]]
                )
