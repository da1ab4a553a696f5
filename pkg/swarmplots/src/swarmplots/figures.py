"""Static figure rendering from simulator CSV outputs.

Every figure kind reads one or more CSVs produced by the simulator CLI
(`run`, `sweep`, `export-channel`) and writes a static image.  Rendering is
deterministic: fixed style, fixed fonts, no timestamps embedded in the file.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib
import numpy as np
import pandas as pd

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

FIGURE_KINDS = ("rssi_curve", "sigma_d_curve", "geometry_bars",
                "stepsize_lines", "attack_lines", "stalking_timeseries")

_STYLE = {
    "figure.figsize": (7.0, 4.5),
    "figure.dpi": 120,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "swarmplots",
}


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: input CSV path(s), figure kind, output image path."""

    inputs: tuple
    kind: str
    output: str

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(
                f"unknown figure kind {self.kind!r}; expected one of {FIGURE_KINDS}")
        if not self.inputs:
            raise ValueError("FigureSpec needs at least one input CSV")
        object.__setattr__(self, "inputs", tuple(str(p) for p in self.inputs))


def _load(path, required_columns):
    df = pd.read_csv(path)
    if df.empty:
        raise ValueError(f"empty CSV: {path}")
    missing = [c for c in required_columns if c not in df.columns]
    if missing:
        raise ValueError(f"{path}: missing column(s) {missing}")
    return df


def _label(path):
    return Path(path).stem


def _fig_rssi_curve(spec):
    df = _load(spec.inputs[0], ["d", "rssi_mean", "rssi_sampled"])
    fig, ax = plt.subplots()
    ax.scatter(df["d"], df["rssi_sampled"], s=6, alpha=0.5, color="#999999",
               label="sampled RSSI")
    ax.plot(df["d"], df["rssi_mean"], color="#cc3311", lw=2,
            label="path-loss mean")
    ax.set_xlabel("distance (m)")
    ax.set_ylabel("RSSI (dBm)")
    ax.set_title("RSSI over distance")
    ax.legend()
    return fig


def _fig_sigma_d_curve(spec):
    df = _load(spec.inputs[0], ["d", "sigma_d"])
    fig, ax = plt.subplots()
    ax.plot(df["d"], df["sigma_d"], color="#0077bb", lw=1.5)
    ax.set_xlabel("distance (m)")
    ax.set_ylabel("distance-error std $\\sigma_d$ (m)")
    ax.set_title("Ranging error std over distance")
    return fig


def _fig_geometry_bars(spec):
    df = _load(spec.inputs[0], ["z_half_m", "solver", "mean_err_m"])
    shapes = sorted(df["z_half_m"].unique())
    solvers = ["ls", "l1", "gd"]
    solvers = [s for s in solvers if s in set(df["solver"])] or \
        sorted(df["solver"].unique())
    fig, ax = plt.subplots()
    width = 0.8 / len(solvers)
    x = np.arange(len(shapes))
    for i, solver in enumerate(solvers):
        sub = df[df["solver"] == solver].set_index("z_half_m")
        vals = [sub.loc[z, "mean_err_m"] for z in shapes]
        ax.bar(x + (i - (len(solvers) - 1) / 2) * width, vals, width,
               label=solver.upper())
    ax.set_xticks(x)
    ax.set_xticklabels([f"±{z:g}" for z in shapes])
    ax.set_xlabel("anchor-box z half-extent (m)")
    ax.set_ylabel("mean localization error (m)")
    ax.set_title("Solver error vs. anchor-box shape")
    ax.legend()
    return fig


def _fig_stepsize_lines(spec):
    df = _load(spec.inputs[0], ["n_anchors", "estimator", "mean_err_m"])
    fig, ax = plt.subplots()
    fixed = sorted(e for e in df["estimator"].unique() if e != "magd")
    cmap = plt.get_cmap("viridis")
    for i, est in enumerate(fixed):
        sub = df[df["estimator"] == est].sort_values("n_anchors")
        ax.plot(sub["n_anchors"], sub["mean_err_m"], lw=1.0, alpha=0.8,
                color=cmap(i / max(len(fixed) - 1, 1)),
                label=est.replace("alpha_", "α = "))
    if "magd" in set(df["estimator"]):
        sub = df[df["estimator"] == "magd"].sort_values("n_anchors")
        # the adaptive series is marked distinctly: heavy dashed black line
        # with square markers, drawn on top of every fixed-step line
        ax.plot(sub["n_anchors"], sub["mean_err_m"], lw=2.8, ls="--",
                color="black", marker="s", ms=6, zorder=10, label="adaptive (MAGD)")
    ax.set_xlabel("number of anchors")
    ax.set_ylabel("mean localization error (m)")
    ax.set_title("Fixed step sizes vs. adaptive step size")
    ax.legend(ncol=2, fontsize=8)
    return fig


def _pick_x_column(df, path):
    for col in df.columns:
        if "malicious" in col:
            return col
    numeric = [c for c in df.columns
               if c not in ("cell_id", "mean_err_m", "std_err_m")
               and pd.api.types.is_numeric_dtype(df[c])]
    if not numeric:
        raise ValueError(f"{path}: missing column(s) ['<malicious-count axis>']")
    return numeric[0]


def _fig_attack_lines(spec):
    fig, ax = plt.subplots()
    for path in spec.inputs:
        df = _load(path, ["mean_err_m"])
        xcol = _pick_x_column(df, path)
        sub = df.sort_values(xcol)
        ax.plot(sub[xcol], sub["mean_err_m"], marker="o", label=_label(path))
        if "std_err_m" in sub.columns and sub["std_err_m"].notna().all():
            ax.fill_between(sub[xcol], sub["mean_err_m"] - sub["std_err_m"],
                            sub["mean_err_m"] + sub["std_err_m"], alpha=0.15)
    ax.set_xlabel("malicious UAVs")
    ax.set_ylabel("mean localization error (m)")
    ax.set_title("Localization error vs. attacker count")
    ax.legend()
    return fig


def _fig_stalking_timeseries(spec):
    fig, ax = plt.subplots()
    for path in spec.inputs:
        df = _load(path, ["t", "err_m"])
        series = df.groupby("t")["err_m"].mean()
        ax.plot(series.index, series.values, label=_label(path))
    ax.set_xlabel("timestep")
    ax.set_ylabel("mean localization error (m)")
    ax.set_title("Localization error over time")
    ax.set_yscale("log")
    ax.legend()
    return fig


_BUILDERS = {
    "rssi_curve": _fig_rssi_curve,
    "sigma_d_curve": _fig_sigma_d_curve,
    "geometry_bars": _fig_geometry_bars,
    "stepsize_lines": _fig_stepsize_lines,
    "attack_lines": _fig_attack_lines,
    "stalking_timeseries": _fig_stalking_timeseries,
}


def build_figure(spec: FigureSpec):
    """Build (and return) the matplotlib Figure for a spec without saving."""
    with plt.rc_context(_STYLE):
        return _BUILDERS[spec.kind](spec)


def render(spec: FigureSpec) -> str:
    """Render the figure to spec.output; never mutates inputs.  Returns the
    output path."""
    fig = build_figure(spec)
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fmt = out.suffix.lstrip(".").lower() or "png"
    metadata = {"Date": None} if fmt == "svg" else {"Software": "swarmplots"}
    try:
        fig.savefig(out, format=fmt, metadata=metadata)
    finally:
        plt.close(fig)
    return str(out)


def render_all(specs) -> list:
    """Render every spec; returns the output paths in order."""
    return [render(spec) for spec in specs]
