"""Experiment configuration and the three figure tables.

A config is an INI file; every key is optional and falls back to the
defaults below. Angles accept ``pi`` forms such as ``pi/4`` or ``2*pi``.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, replace

import numpy as np

from . import order_stats, reliability, simulator
from .model import FadingModel, LinkModel, ModelError, NetworkModel
from .verify import VerifySettings

DEFAULTS: dict[str, dict[str, str]] = {
    "network": {"lam": "1e-4", "alpha": "3", "phi": "pi/4"},
    "fading": {"m": "2", "omega": "1"},
    "link": {"u": "80", "eta": "1"},
    "sim": {
        "trials": "100000",
        "outage_trials": "10000",
        "seed": "1",
        "tail_tolerance": "1e-2",
        "workers": "1",
    },
    "dominant_cdf": {"ranks": "1, 2, 5", "lo": "1e-9", "hi": "1e-3", "points": "121"},
    "outage": {"ranks": "1, 3", "fading_m": "2, 1", "phi": "pi/8, pi/4, pi/2, pi, 2*pi"},
    "qos": {
        "lambda_d": "0.14",
        "eps_target": "0.05",
        "q_max": "10",
        "rates": "0.2, 0.3",
        "ranks": "1, 3",
        "lo": "1",
        "hi": "1000",
        "points": "61",
        "r_hi": "20",
    },
    "verify": {"criteria": "1-9"},
}

VERIFY_KEYS = {"criteria"} | {
    name for name, f in VerifySettings.__dataclass_fields__.items() if f.type in ("int", "float")
}


class ConfigError(ValueError):
    """Malformed or out-of-range configuration."""


_ANGLE = re.compile(r"^\s*(?:([0-9.eE+-]+)\s*\*\s*)?pi\s*(?:/\s*([0-9.eE+-]+))?\s*$")


def parse_number(text: str) -> float:
    """A float, or a multiple/fraction of pi such as ``3*pi/4``."""
    m = _ANGLE.match(text)
    try:
        if m:
            num = float(m.group(1)) if m.group(1) else 1.0
            den = float(m.group(2)) if m.group(2) else 1.0
            return num * math.pi / den
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"not a number: {text!r}") from None


def parse_list(text: str) -> list[float]:
    items = [t for t in text.split(",") if t.strip()]
    if not items:
        raise ConfigError("empty list")
    return [parse_number(t) for t in items]


def parse_ints(text: str) -> list[int]:
    out = []
    for v in parse_list(text):
        if not v.is_integer() or v < 1:
            raise ConfigError(f"expected positive integers, got {text!r}")
        out.append(int(v))
    return out


def parse_criteria(text: str) -> list[int]:
    """``1-9`` or ``1, 4, 7`` style selections."""
    out: set[int] = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, _, hi = part.partition("-")
        try:
            a, b = int(lo), int(hi or lo)
        except ValueError:
            raise ConfigError(f"bad criterion selection {text!r}") from None
        if not 1 <= a <= b <= 9:
            raise ConfigError(f"criteria must lie in 1..9, got {part!r}")
        out.update(range(a, b + 1))
    if not out:
        raise ConfigError("no criteria selected")
    return sorted(out)


@dataclass(frozen=True)
class Sweep:
    lo: float
    hi: float
    points: int
    log: bool = True

    def values(self) -> np.ndarray:
        if self.points < 2 or not 0 < self.lo < self.hi:
            raise ConfigError(f"sweep needs 0 < lo < hi and points >= 2, got {self}")
        return np.geomspace(self.lo, self.hi, self.points) if self.log else np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class ExperimentConfig:
    net: NetworkModel
    fading: FadingModel
    link: LinkModel
    sim: simulator.SimConfig
    outage_trials: int
    cdf_ranks: tuple[int, ...]
    power_sweep: Sweep
    outage_ranks: tuple[int, ...]
    outage_m: tuple[float, ...]
    outage_phi: tuple[float, ...]
    qos: reliability.QosSpec
    qos_rates: tuple[float, ...]
    qos_ranks: tuple[int, ...]
    q_max_sweep: Sweep
    r_hi: float
    verify: dict[str, str] = field(default_factory=dict)

    def with_overrides(self, seed: int | None = None, trials: int | None = None) -> "ExperimentConfig":
        cfg = self
        if seed is not None:
            cfg = replace(cfg, sim=_sim_replace(cfg.sim, seed=seed))
        if trials is not None:
            cfg = replace(cfg, sim=_sim_replace(cfg.sim, trials=trials), outage_trials=trials)
        return cfg


def _sim_replace(sim: simulator.SimConfig, **kw) -> simulator.SimConfig:
    try:
        return replace(sim, **kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | None = None) -> ExperimentConfig:
    """Read an INI file (or only defaults when ``path`` is None)."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.read_dict(DEFAULTS)
    if path is not None:
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except configparser.Error as exc:
            raise ConfigError(f"malformed config {path}: {exc}") from None
    for section in parser.sections():
        if section not in DEFAULTS:
            raise ConfigError(f"unknown section [{section}]")
        allowed = VERIFY_KEYS if section == "verify" else set(DEFAULTS[section])
        unknown = set(parser[section]) - allowed
        if unknown:
            raise ConfigError(f"unknown keys in [{section}]: {', '.join(sorted(unknown))}")
    try:
        return _build(parser)
    except (ModelError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def _build(p: configparser.ConfigParser) -> ExperimentConfig:
    num = lambda sec, key: parse_number(p[sec][key])  # noqa: E731
    integer = lambda sec, key: parse_ints(p[sec][key])[0]  # noqa: E731
    net = NetworkModel(num("network", "lam"), num("network", "alpha"), num("network", "phi"))
    fading = FadingModel(num("fading", "m"), num("fading", "omega"))
    link = LinkModel(num("link", "u"), num("link", "eta"))
    sim = simulator.SimConfig(
        trials=integer("sim", "trials"),
        seed=int(num("sim", "seed")),
        tail_tolerance=num("sim", "tail_tolerance"),
        workers=integer("sim", "workers"),
    )
    d, o, q = p["dominant_cdf"], p["outage"], p["qos"]
    qos = reliability.QosSpec(num("qos", "q_max"), num("qos", "eps_target"), num("qos", "lambda_d"))
    cfg = ExperimentConfig(
        net=net,
        fading=fading,
        link=link,
        sim=sim,
        outage_trials=integer("sim", "outage_trials"),
        cdf_ranks=tuple(parse_ints(d["ranks"])),
        power_sweep=Sweep(parse_number(d["lo"]), parse_number(d["hi"]), parse_ints(d["points"])[0]),
        outage_ranks=tuple(parse_ints(o["ranks"])),
        outage_m=tuple(parse_list(o["fading_m"])),
        outage_phi=tuple(parse_list(o["phi"])),
        qos=qos,
        qos_rates=tuple(parse_list(q["rates"])),
        qos_ranks=tuple(parse_ints(q["ranks"])),
        q_max_sweep=Sweep(parse_number(q["lo"]), parse_number(q["hi"]), parse_ints(q["points"])[0]),
        r_hi=parse_number(q["r_hi"]),
        verify=dict(p["verify"]),
    )
    cfg.power_sweep.values()
    cfg.q_max_sweep.values()
    if max(cfg.cdf_ranks) > sim.max_rank:
        raise ConfigError(f"ranks above {sim.max_rank} are not recorded by the simulator")
    for phi in cfg.outage_phi:
        NetworkModel(net.lam, net.alpha, phi)
    for m in cfg.outage_m:
        FadingModel(m, fading.omega)
    for r in cfg.qos_rates:
        if not r > qos.lambda_d:
            raise ConfigError(f"rate {r} must exceed lambda_d = {qos.lambda_d}")
    return cfg


@dataclass
class Table:
    header: list[str]
    rows: np.ndarray
    extra: list["Table"] = field(default_factory=list)
    samples: list[tuple[dict, simulator.TrialSummary]] = field(default_factory=list)


def dominant_cdf_table(cfg: ExperimentConfig) -> Table:
    """Analytic and empirical CDFs of I_n, plus the ECDF of the n-th nearest node's power."""
    x = cfg.power_sweep.values()
    summary = simulator.simulate(cfg.net, cfg.fading, cfg.sim)
    cols, analytic, emp, near = [x], [], [], []
    for n in cfg.cdf_ranks:
        analytic.append(order_stats.cdf_In(cfg.net, cfg.fading, n, x))
        emp.append(simulator.empirical_cdf_In(cfg.net, cfg.fading, cfg.sim, n, summary=summary).cdf(x))
        near.append(
            simulator.empirical_cdf_nth_nearest_power(cfg.net, cfg.fading, cfg.sim, n, summary=summary).cdf(x)
        )
    header = (
        ["power"]
        + [f"analytic_cdf_n{n}" for n in cfg.cdf_ranks]
        + [f"empirical_cdf_n{n}" for n in cfg.cdf_ranks]
        + [f"nearest_empirical_cdf_n{n}" for n in cfg.cdf_ranks]
    )
    rows = np.column_stack(cols + analytic + emp + near)
    return Table(header, rows, samples=[({"figure": "dominant_cdf"}, summary)])


def outage_table(cfg: ExperimentConfig) -> Table:
    """Analytic and simulated outage against the reception angle."""
    phis = np.asarray(cfg.outage_phi)
    sim = replace(cfg.sim, trials=cfg.outage_trials)
    analytic, emp, names_a, names_e, samples = [], [], [], [], []
    for m in cfg.outage_m:
        fading = FadingModel(m, cfg.fading.omega)
        a_cols = {n: [] for n in cfg.outage_ranks}
        e_cols = {n: [] for n in cfg.outage_ranks}
        for phi in phis:
            net = NetworkModel(cfg.net.lam, cfg.net.alpha, float(phi))
            summary = simulator.simulate(net, fading, sim)
            samples.append(({"m": m, "phi": float(phi)}, summary))
            for n in cfg.outage_ranks:
                a_cols[n].append(reliability.outage_probability(net, fading, cfg.link, n))
                e_cols[n].append(simulator.empirical_outage(net, fading, cfg.link, sim, n, summary=summary).mean)
        for n in cfg.outage_ranks:
            names_a.append(f"analytic_m{m:g}_n{n}")
            names_e.append(f"empirical_m{m:g}_n{n}")
            analytic.append(a_cols[n])
            emp.append(e_cols[n])
    rows = np.column_stack([phis] + analytic + emp)
    return Table(["phi"] + names_a + names_e, rows, samples=samples)


DECISION_HEADER = [
    "n",
    "q_max",
    "eps_target",
    "feasible",
    "r_star",
    "eps_inf",
    "r_opt",
    "eps_opt",
    "r_min",
    "edge_condition",
]


def qos_table(cfg: ExperimentConfig) -> Table:
    """Total error against Q_max for each (rate, rank), plus one rate decision per rank."""
    q = cfg.q_max_sweep.values()
    cols, names = [q], []
    for r in cfg.qos_rates:
        for n in cfg.qos_ranks:
            cols.append(reliability.total_error_vs_qmax(cfg.net, cfg.fading, cfg.link, cfg.qos, n, r, q))
            names.append(f"eps_total_r{r:g}_n{n}")
    decisions = []
    for n in cfg.qos_ranks:
        d = reliability.qos_feasibility(cfg.net, cfg.fading, cfg.link, cfg.qos, n, r_hi=cfg.r_hi)
        decisions.append(
            [
                n,
                cfg.qos.q_max,
                cfg.qos.eps_target,
                int(d.feasible),
                math.nan if d.r_star is None else d.r_star,
                d.eps_inf,
                d.r_opt,
                d.eps_opt,
                d.r_min,
                int(d.edge_condition),
            ]
        )
    block = Table(DECISION_HEADER, np.asarray(decisions, dtype=float))
    return Table(["q_max"] + names, np.column_stack(cols), extra=[block])

