"""PNG renderings of the experiment tables.

Figures are built on ``matplotlib.figure.Figure`` directly, so nothing
touches pyplot state or needs a display.
"""

from __future__ import annotations

import math

from matplotlib.figure import Figure

from .experiments import Table

STYLE = {
    "figsize": (5.0, 3.6),
    "dpi": 150,
}


def _figure():
    fig = Figure(figsize=STYLE["figsize"], dpi=STYLE["dpi"], layout="constrained")
    return fig, fig.add_subplot()


def _columns(table: Table, prefix: str):
    return [(i, h) for i, h in enumerate(table.header) if h.startswith(prefix)]


def dominant_cdf_figure(table: Table) -> Figure:
    fig, ax = _figure()
    x = table.rows[:, 0]
    for prefix, style in (("analytic_cdf_", "-"), ("empirical_cdf_", "o"), ("nearest_empirical_cdf_", "--")):
        for i, name in _columns(table, prefix):
            n = name.rsplit("_n", 1)[1]
            kw = {"markersize": 3, "markerfacecolor": "none"} if style == "o" else {}
            ax.plot(x, table.rows[:, i], style, label=f"{prefix.rstrip('_').replace('_', ' ')}, n={n}", **kw)
    ax.set_xscale("log")
    ax.set_xlabel("received power")
    ax.set_ylabel("CDF")
    ax.legend(fontsize=6, ncol=2)
    return fig


def outage_figure(table: Table) -> Figure:
    fig, ax = _figure()
    phi = table.rows[:, 0]
    for i, name in _columns(table, "analytic_"):
        ax.plot(phi, table.rows[:, i], "-", label=name.replace("_", " "))
    for i, name in _columns(table, "empirical_"):
        ax.plot(phi, table.rows[:, i], "x", label=name.replace("_", " "))
    ax.set_xscale("log", base=2)
    ax.set_xticks(phi, [f"{p / math.pi:g}π" for p in phi])
    ax.set_xlabel("reception angle φ")
    ax.set_ylabel("outage probability")
    ax.legend(fontsize=6, ncol=2)
    return fig


def qos_figure(table: Table) -> Figure:
    fig, ax = _figure()
    q = table.rows[:, 0]
    for i, name in enumerate(table.header[1:], start=1):
        r, n = name.removeprefix("eps_total_r").split("_n")
        ax.plot(q, table.rows[:, i], label=f"r={r}, n={n}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"$Q_{\max}$")
    ax.set_ylabel("total error probability")
    ax.legend(fontsize=7)
    return fig


FIGURES = {
    "dominant-cdf": dominant_cdf_figure,
    "outage": outage_figure,
    "qos": qos_figure,
}


def save_figure(command: str, table: Table, path) -> None:
    FIGURES[command](table).savefig(path)
