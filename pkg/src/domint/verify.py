"""Analytic-versus-simulation acceptance checks.

Each criterion returns a list of :class:`Check` records; a criterion passes
when all its checks pass. Simulations shared between criteria are cached
per run.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy import integrate

from . import laplace, order_stats, reliability, simulator, specfun
from .model import FadingModel, LinkModel, NetworkModel
from .numerics import gamma_weighted_expectation

Z99 = 2.5758293035489004


@dataclass(frozen=True)
class Check:
    criterion: int
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""


@dataclass(frozen=True)
class VerifySettings:
    """Trial budgets and tolerances of the acceptance run."""

    seed: int = 1
    workers: int = 1
    cdf_trials: int = 100_000
    moment_trials: int = 100_000
    outage_trials: int = 10_000
    exclusion_trials: int = 400
    rate_grid_points: int = 10_000
    ks_tol: float = 0.02
    moment_rtol: float = 0.03
    partial_rtol: float = 0.05
    identity_rtol: float = 1e-6
    laplace_rtol: float = 0.01
    conditional_rtol: float = 0.02
    exclusion_rtol: float = 0.05
    exclusion_identity_rtol: float = 1e-10
    outage_atol: float = 0.02
    optimum_atol: float = 1e-6
    dual_route_rtol: float = 1e-10
    normalisation_atol: float = 1e-6
    cdf_runtime_s: float = 60.0
    total_runtime_s: float = 300.0
    tail_tolerance: float = simulator.DEFAULT_TAIL_TOLERANCE
    u: float = 80.0
    lambda_d: float = 0.14
    eps_target: float = 0.05
    q_max: float = 10.0
    rates: tuple[float, ...] = (0.2, 0.3)

    @classmethod
    def from_mapping(cls, values: dict[str, str], **overrides) -> "VerifySettings":
        kw: dict = {}
        for name, f in cls.__dataclass_fields__.items():
            if name in values:
                kw[name] = int(float(values[name])) if f.type == "int" else float(values[name])
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kw)


@dataclass
class _Context:
    settings: VerifySettings
    net: NetworkModel = field(default_factory=lambda: NetworkModel(1e-4, 3.0, math.pi / 4))
    fading: FadingModel = field(default_factory=lambda: FadingModel(2.0))
    timings: dict[str, float] = field(default_factory=dict)

    def _sim(self, trials, **kw) -> simulator.SimConfig:
        s = self.settings
        return simulator.SimConfig(
            trials=trials, seed=s.seed, workers=s.workers, tail_tolerance=s.tail_tolerance, **kw
        )

    @cached_property
    def plain(self) -> simulator.TrialSummary:
        t0 = time.perf_counter()
        out = simulator.simulate(self.net, self.fading, self._sim(self.settings.cdf_trials))
        self.timings["plain"] = time.perf_counter() - t0
        return out

    @cached_property
    def weighted(self) -> simulator.TrialSummary:
        cfg = self._sim(self.settings.moment_trials, importance_radius=simulator.importance_radius(self.net))
        return simulator.simulate(self.net, self.fading, cfg)

    def for_rank(self, n: int) -> simulator.TrialSummary:
        """Importance-weighted run where E[I_n^2] diverges (n <= alpha), plain run otherwise."""
        return self.weighted if n <= self.net.alpha else self.plain

    def s_grid(self, n: int) -> np.ndarray:
        return np.array([0.5, 1.0, 2.0]) / laplace.mean_partial_interference(self.net, self.fading, n)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def criterion_1(ctx: _Context) -> list[Check]:
    s = ctx.settings
    summary = ctx.plain
    out = []
    for n in (1, 2, 5):
        d = simulator.empirical_cdf_In(ctx.net, ctx.fading, None, n, summary=summary).sup_distance(
            lambda x: order_stats.cdf_In(ctx.net, ctx.fading, n, x)
        )
        out.append(Check(1, f"sup|F_I{n} - ECDF|", d <= s.ks_tol, d, s.ks_tol, f"{summary.trials} trials"))
    runtime = ctx.timings.get("plain", math.nan)
    out.append(Check(1, "simulation runtime [s]", runtime < s.cdf_runtime_s, runtime, s.cdf_runtime_s))
    return out


def criterion_2(ctx: _Context) -> list[Check]:
    s = ctx.settings
    out = []
    for n in range(2, 7):
        exact = order_stats.mean_In(ctx.net, ctx.fading, n)
        est = simulator.empirical_mean_In(ctx.net, ctx.fading, None, n, summary=ctx.for_rank(n))
        rel = _rel(est.mean, exact)
        out.append(Check(2, f"E[I{n}] relative error", rel <= s.moment_rtol, rel, s.moment_rtol))
        # five intervals at once: Bonferroni, 99% each
        half = est.half_width * Z99 / simulator.Z95
        out.append(
            Check(2, f"E[I{n}] inside 99% CI", abs(est.mean - exact) <= half, abs(est.mean - exact) / half, 1.0)
        )
    return out


def criterion_3(ctx: _Context) -> list[Check]:
    s = ctx.settings
    out = []
    for n in range(1, 6):
        exact = laplace.mean_partial_interference(ctx.net, ctx.fading, n)
        # I(n) carries I_{n+1}, so it inherits that power's tail
        est = simulator.empirical_partial_sum(ctx.net, ctx.fading, None, n, summary=ctx.for_rank(n + 1))
        rel = _rel(est.mean, exact)
        out.append(Check(3, f"mean I({n}) vs simulation", rel <= s.partial_rtol, rel, s.partial_rtol))
        quad = gamma_weighted_expectation(
            lambda z: laplace.conditional_mean_partial_interference(ctx.net, ctx.fading, z), n, ctx.net, ctx.fading
        )
        rel = _rel(quad.value, exact)
        out.append(Check(3, f"quadrature identity n={n}", rel <= s.identity_rtol, rel, s.identity_rtol))
    return out


def criterion_4(ctx: _Context) -> list[Check]:
    s = ctx.settings
    out = []
    for n in (1, 3):
        zbar = order_stats.mean_zn(ctx.net, ctx.fading, n)
        values = laplace.laplace_unconditional(ctx.net, ctx.fading, n, ctx.s_grid(n))
        for k, s_arg, exact in zip((0.5, 1.0, 2.0), ctx.s_grid(n), values):
            est = simulator.empirical_laplace(ctx.net, ctx.fading, None, n, s_arg, summary=ctx.plain)
            rel = _rel(est.mean, exact)
            out.append(Check(4, f"L n={n} s={k:g}/E[I(n)]", rel <= s.laplace_rtol, rel, s.laplace_rtol))
            cond, z, w = simulator.empirical_conditional_laplace(
                ctx.net, ctx.fading, None, n, s_arg, zbar, summary=ctx.plain
            )
            analytic = float(np.average(laplace.laplace_conditional(ctx.net, ctx.fading, s_arg, z), weights=w))
            rel = _rel(cond.mean, analytic)
            out.append(
                Check(
                    4, f"L(.|z) n={n} s={k:g}/E[I(n)]", rel <= s.conditional_rtol, rel, s.conditional_rtol,
                    f"{z.size} trials in the 5% bin",
                )
            )
    return out


def criterion_5(ctx: _Context) -> list[Check]:
    out = []
    for n in (1, 3):
        grid = ctx.s_grid(n)
        lo = laplace.lower_bound(ctx.net, ctx.fading, n, grid)
        mid = laplace.laplace_unconditional(ctx.net, ctx.fading, n, grid)
        hi = laplace.upper_bound(ctx.net, ctx.fading, n, grid)
        gap = float(min(np.min(mid - lo), np.min(hi - mid)))
        out.append(Check(5, f"lower <= L <= upper, n={n}", gap >= 0, gap, 0.0))
    z1 = order_stats.mean_zn(ctx.net, ctx.fading, 1)
    z = z1 * np.geomspace(1.0, 1e3, 400)
    worst = -math.inf
    for n in (1, 3):
        for s_arg in ctx.s_grid(n):
            d2 = laplace.laplace_z_second_derivative(ctx.net, ctx.fading, s_arg, z)
            h = 1e-3 * z
            f = lambda x: laplace.laplace_conditional(ctx.net, ctx.fading, s_arg, x)  # noqa: E731
            fd = (f(z + h) - 2 * f(z) + f(z - h)) / h**2
            roundoff = 8 * np.finfo(float).eps * f(z) / h**2
            worst = max(worst, float(np.max(d2)), float(np.max(fd - roundoff)))
    out.append(Check(5, "d2L/dz2 <= 0 for z >= mean z_1", worst <= 0, worst, 0.0))
    return out


def criterion_6(ctx: _Context) -> list[Check]:
    s = ctx.settings
    omni = NetworkModel(ctx.net.lam, ctx.net.alpha, 2 * math.pi)
    out = []
    for n in (1, 3):
        target = laplace.mean_partial_interference(ctx.net, ctx.fading, n)
        radius = laplace.equivalent_exclusion_radius(ctx.net, ctx.fading, n)
        ident = _rel(laplace.omni_excluded_mean(omni, ctx.fading, radius), target)
        out.append(
            Check(6, f"exclusion identity n={n}", ident <= s.exclusion_identity_rtol, ident, s.exclusion_identity_rtol)
        )
        cfg = simulator.SimConfig(
            trials=s.exclusion_trials, seed=s.seed, workers=s.workers, window_radius=10 * radius, tail_tolerance=None
        )
        est = simulator.empirical_exclusion_sum(omni, ctx.fading, cfg, radius)
        rel = _rel(est.mean, target)
        out.append(
            Check(6, f"omni exclusion R={radius:.1f} n={n}", rel <= s.exclusion_rtol, rel, s.exclusion_rtol)
        )
    return out


OUTAGE_PHI = (math.pi / 8, math.pi / 4, math.pi / 2, math.pi, 2 * math.pi)


def criterion_7(ctx: _Context) -> list[Check]:
    s = ctx.settings
    link = LinkModel(s.u, 1.0)
    analytic: dict[tuple[int, int], list[float]] = {}
    worst = 0.0
    for m in (1, 2):
        fading = FadingModel(float(m))
        for phi in OUTAGE_PHI:
            net = NetworkModel(ctx.net.lam, ctx.net.alpha, phi)
            summary = simulator.simulate(net, fading, ctx._sim(s.outage_trials))
            for n in (1, 3):
                a = reliability.outage_probability(net, fading, link, n)
                e = simulator.empirical_outage(net, fading, link, None, n, summary=summary).mean
                analytic.setdefault((m, n), []).append(a)
                worst = max(worst, abs(a - e))
    out = [Check(7, "max |analytic - simulated| outage", worst <= s.outage_atol, worst, s.outage_atol)]
    increasing = all(np.all(np.diff(v) > 0) for v in analytic.values())
    out.append(Check(7, "outage increasing in phi", increasing, float(increasing), 1.0))
    lower = all(np.all(np.asarray(analytic[(m, 3)]) < analytic[(m, 1)]) for m in (1, 2))
    out.append(Check(7, "n=3 below n=1", lower, float(lower), 1.0))
    diff = np.sign(np.asarray(analytic[(1, 1)]) - np.asarray(analytic[(2, 1)]))
    crossings = int(np.count_nonzero(np.diff(diff)))
    out.append(Check(7, "Rayleigh / m=2 crossover in sweep", crossings >= 1, crossings, 1.0, f"u={s.u:g}"))
    return out


def criterion_8(ctx: _Context) -> list[Check]:
    s = ctx.settings
    link = LinkModel(s.u, 1.0)
    qos = reliability.QosSpec(s.q_max, s.eps_target, s.lambda_d)
    out = []
    for n in (1, 3):
        decision = reliability.qos_feasibility(ctx.net, ctx.fading, link, qos, n)
        r_min = decision.r_min
        span = reliability.R_HI_DEFAULT - r_min
        grid = r_min + np.geomspace(1e-7 * span, span, s.rate_grid_points)
        eps_r = np.asarray(reliability.link_error_prob(ctx.net, ctx.fading, link, n, grid))
        theta = np.array([reliability.invert_effective_bandwidth(r, s.lambda_d) for r in grid])
        eps_q = np.exp(-theta * s.q_max)
        sign = np.sign(eps_q - eps_r)
        changes = np.flatnonzero(np.diff(sign))
        out.append(Check(8, f"unique crossing n={n}", changes.size == 1, changes.size, 1.0))
        if changes.size:
            i = changes[0]
            # linear interpolation of the gap between the bracketing grid points
            g0, g1 = eps_q[i] - eps_r[i], eps_q[i + 1] - eps_r[i + 1]
            w = g0 / (g0 - g1)
            er = (1 - w) * eps_r[i] + w * eps_r[i + 1]
            verdict = er <= 1 - math.sqrt(1 - s.eps_target)
            out.append(
                Check(8, f"feasibility verdict n={n}", verdict == decision.feasible, float(decision.feasible), float(verdict))
            )
        total = eps_q + eps_r - eps_q * eps_r
        gap = decision.eps_opt - float(total.min())
        out.append(
            Check(8, f"optimum vs grid minimum n={n}", abs(gap) <= s.optimum_atol, gap, s.optimum_atol,
                  f"r_opt={decision.r_opt:.6g} r*={decision.r_star}")
        )
        for r in s.rates:
            q = np.geomspace(1, 1e4, 200)
            curve = np.asarray(reliability.total_error_vs_qmax(ctx.net, ctx.fading, link, qos, n, r, q))
            floor = float(reliability.link_error_prob(ctx.net, ctx.fading, link, n, r))
            flat = np.all(np.diff(curve) <= 0) and _rel(curve[-1], floor) <= 1e-9
            out.append(Check(8, f"eps(Q_max) falls to eps_r, r={r:g} n={n}", bool(flat), _rel(curve[-1], floor), 1e-9))
    return out


def criterion_9(ctx: _Context) -> list[Check]:
    s = ctx.settings
    net, fading = ctx.net, ctx.fading
    out = []
    worst = math.inf
    for n in (1, 3):
        for z in (0.3, 1.0, 3.0):
            zn = z * order_stats.mean_zn(net, fading, n)
            for s_arg in np.concatenate([[0.0], ctx.s_grid(n)]):
                d = laplace.laplace_derivatives(net, fading, 4, s_arg, zn)
                worst = min(worst, min(float((-1) ** k * d[k]) for k in range(5)))
    out.append(Check(9, "(-1)^k L^(k) >= 0, k <= 4", worst >= 0, worst, 0.0))

    twin = NetworkModel(net.lam * 4, net.alpha, net.phi / 4)
    s_arg = ctx.s_grid(1)
    a = laplace.laplace_unconditional(net, fading, 1, s_arg)
    b = laplace.laplace_unconditional(twin, fading, 1, s_arg)
    rel = float(np.max(np.abs(a - b) / a))
    out.append(Check(9, "phi*lam invariance", rel <= 1e-12, rel, 1e-12))

    worst = 0.0
    for n in (1, 2, 5):
        # integrate in log z: removes the z^(2n/alpha - 1) endpoint singularity
        centre = math.log(order_stats.mean_zn(net, fading, n))
        total = integrate.quad(
            lambda u: order_stats.pdf_zn(net, fading, n, math.exp(u)) * math.exp(u),
            centre - 60, centre + 10, points=[centre], limit=400, epsabs=0, epsrel=1e-12,
        )[0]
        worst = max(worst, abs(total - 1))
    worst = max(worst, abs(integrate.quad(fading.pdf, 0, np.inf, epsabs=0, epsrel=1e-12)[0] - 1))
    out.append(Check(9, "pdf normalisation", worst <= s.normalisation_atol, worst, s.normalisation_atol))

    worst = 0.0
    for a_par in (-2 / 3, -0.25, -1.5, -2.5):
        for x in (1e-3, 0.1, 0.7, 2.0, 5.0):
            series = specfun.lower_inc_gamma_series(a_par, x)
            recur = float(specfun.lower_inc_gamma(a_par, x))
            worst = max(worst, _rel(recur, series))
    out.append(Check(9, "incomplete gamma dual route", worst <= s.dual_route_rtol, worst, s.dual_route_rtol))

    cfg = simulator.SimConfig(trials=64, seed=s.seed, tail_tolerance=0.05)
    one = simulator.simulate(net, fading, cfg)
    many = simulator.simulate(net, fading, replace(cfg, workers=2))
    same = all(
        np.array_equal(getattr(one, k), getattr(many, k), equal_nan=True)
        for k in ("top", "nearest", "total", "count", "signal_gain", "weight")
    )
    out.append(Check(9, "same draws for 1 and 2 workers", same, float(same), 1.0))
    return out


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
}

TITLES = {
    1: "dominant power CDF vs simulation",
    2: "mean dominant power",
    3: "mean partial interference",
    4: "Laplace functional",
    5: "Laplace bounds and concavity",
    6: "equivalent exclusion radius",
    7: "outage vs reception angle",
    8: "rate adaptation under QoS",
    9: "property suites",
}


def run(settings: VerifySettings | None = None, criteria=None) -> dict[int, list[Check]]:
    """Run the selected criteria (all by default)."""
    settings = settings or VerifySettings()
    ctx = _Context(settings)
    t0 = time.perf_counter()
    results = {c: CRITERIA[c](ctx) for c in sorted(criteria or CRITERIA)}
    if 9 in results:
        elapsed = time.perf_counter() - t0
        results[9].append(
            Check(9, "total verification runtime [s]", elapsed < settings.total_runtime_s, elapsed, settings.total_runtime_s)
        )
    return results


def passed(checks: list[Check]) -> bool:
    return all(c.passed for c in checks)


def summary_lines(results: dict[int, list[Check]]) -> list[str]:
    lines = []
    for c, checks in results.items():
        status = "PASS" if passed(checks) else "FAIL"
        failing = [k.name for k in checks if not k.passed]
        tail = f" (failed: {'; '.join(failing)})" if failing else ""
        lines.append(f"criterion {c} {status}: {TITLES[c]}{tail}")
    return lines


CHECK_HEADER = ["criterion", "check", "passed", "value", "tolerance", "detail"]


def check_rows(results: dict[int, list[Check]]) -> list[list]:
    return [
        [k.criterion, k.name, int(k.passed), k.value, k.tolerance, k.detail]
        for checks in results.values()
        for k in checks
    ]
