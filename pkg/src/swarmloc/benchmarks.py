"""Solver benchmarks: the anchor-geometry sweep (box shapes at constant
maximum range) and the fixed-step-size vs adaptive-step comparison on a
co-moving swarm."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import RangingChannel
from .errors import SingularGeometryError
from .localizers import (AdmmConfig, GdConfig, ObservationSet, convert_error,
                         error_weights, localize_gd, localize_l1_admm,
                         localize_ls)
from .magd import MagdConfig, magd_adapt, magd_init, magd_inner_descent
from .model import PositionNoiseModel, UavState, observe

GEOMETRY_MAX_RANGE = 50.0


@dataclass
class GeometryBenchConfig:
    n_anchors: int = 30
    reps: int = 50
    z_half_extents: tuple = (1.0, 5.0, 10.0, 15.0, 20.0, 24.0, 28.0)
    rho: float = 0.1
    gd_alpha0: float = 1.0
    gd_beta: float = 0.5
    sigma_p_min: float = 0.1 ** 0.5
    sigma_p_max: float = 3.0 ** 0.5
    channel: RangingChannel = field(default_factory=RangingChannel)
    seed: int = 42


def box_half_extents(z_half: float) -> tuple:
    """xy half-extent keeping the corner distance at GEOMETRY_MAX_RANGE."""
    xy = math.sqrt((GEOMETRY_MAX_RANGE**2 - z_half**2) / 2.0)
    return xy, xy, z_half


def _sample_shape_obs(z_half, cfg: GeometryBenchConfig, rng):
    # Unit-cube draws scaled per shape: with one rng stream per repetition the
    # same randomness is reused across shapes (common random numbers), so the
    # per-shape comparison isolates the geometry effect.
    half = np.asarray(box_half_extents(z_half))
    noise = PositionNoiseModel(cfg.sigma_p_min, cfg.sigma_p_max)
    reports = []
    for i in range(cfg.n_anchors):
        pos = rng.uniform(-1.0, 1.0, 3) * half
        anchor = UavState(id=i, true_pos=pos, sigma_p=noise.draw_sigma_p(rng),
                          speed=0.0, destination=pos.copy())
        reports.append(observe(anchor, np.zeros(3), cfg.channel, rng))
    return ObservationSet(target_id=-1, reports=reports)


def run_geometry_benchmark(cfg: GeometryBenchConfig):
    """Mean localization error of LS / L1-ADMM / GD per box shape.  Iteration
    budgets K_ADMM = K_GD = n_anchors keep equal computational complexity.
    Rare singular geometries are resampled.  Returns a list of row dicts."""
    k = cfg.n_anchors
    admm = AdmmConfig(rho=cfg.rho, k_admm=k)
    gd = GdConfig(alpha0=cfg.gd_alpha0, beta=cfg.gd_beta, k_gd=k)
    rows = []
    for z_half in cfg.z_half_extents:
        errs = {"ls": [], "l1": [], "gd": []}
        for rep in range(cfg.reps):
            rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, rep]))
            while True:
                obs = _sample_shape_obs(z_half, cfg, rng)
                try:
                    est_ls = localize_ls(obs)
                    est_l1 = localize_l1_admm(obs, admm)
                    break
                except SingularGeometryError:
                    continue
            start = np.mean(obs.positions(), axis=0)
            est_gd = localize_gd(obs, gd, start)
            errs["ls"].append(np.linalg.norm(est_ls))
            errs["l1"].append(np.linalg.norm(est_l1))
            errs["gd"].append(np.linalg.norm(est_gd))
        xy_half = box_half_extents(z_half)[0]
        for solver in ("ls", "l1", "gd"):
            rows.append({
                "z_half_m": z_half,
                "xy_half_m": round(xy_half, 4),
                "solver": solver,
                "mean_err_m": float(np.mean(errs[solver])),
            })
    return rows


@dataclass
class StepsizeBenchConfig:
    """Tracking setup: static anchors uniform in a cube, one target doing
    random-waypoint motion inside a smaller concentric box, with its speed
    redrawn periodically.  All pairwise distances stay below the reliable
    ranging limit by construction."""

    n_anchors_grid: tuple = (5, 10, 15, 20, 25, 30, 35, 40)
    fixed_alphas: tuple = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0)
    reps: int = 50
    total_steps: int = 50
    speed_min: float = 0.6
    speed_max: float = 3.4
    speed_redraw_period: int = 10
    cube_half: float = 15.0
    target_half: float = 10.0
    sigma_p_min: float = 0.1 ** 0.5
    sigma_p_max: float = 3.0 ** 0.5
    channel: RangingChannel = field(default_factory=RangingChannel)
    # window=1: with speeds redrawn every 10 ticks, the step-size enlargement
    # must react within a tick or tracking lag accumulates at high anchor
    # counts; longer windows suit slow, noise-dominated scenarios instead.
    magd: MagdConfig = field(default_factory=lambda: MagdConfig(window=1))
    seed: int = 42


def _simulate_swarm_trace(n_a: int, cfg: StepsizeBenchConfig, rng):
    """World + measurement trace shared by every estimator column so the
    comparison runs on matched realizations.  Returns (true_pos, obs) per tick."""
    noise = PositionNoiseModel(cfg.sigma_p_min, cfg.sigma_p_max)
    anchor_pos = rng.uniform(-cfg.cube_half, cfg.cube_half, size=(n_a, 3))
    sigma_ps = np.array([noise.draw_sigma_p(rng) for _ in range(n_a)])
    target_pos = np.zeros(3)
    target_dest = rng.uniform(-cfg.target_half, cfg.target_half, 3)
    target_speed = rng.uniform(cfg.speed_min, cfg.speed_max)

    trace = []
    for t in range(1, cfg.total_steps + 1):
        if t > 1 and (t - 1) % cfg.speed_redraw_period == 0:
            target_speed = rng.uniform(cfg.speed_min, cfg.speed_max)
        remaining = np.linalg.norm(target_dest - target_pos)
        if remaining <= target_speed:
            target_pos = target_dest.copy()
            target_dest = rng.uniform(-cfg.target_half, cfg.target_half, 3)
        else:
            target_pos = target_pos + (target_dest - target_pos) / remaining * target_speed
        reports = []
        for i in range(n_a):
            anchor = UavState(id=i, true_pos=anchor_pos[i],
                              sigma_p=float(sigma_ps[i]), speed=0.0,
                              destination=anchor_pos[i].copy())
            reports.append(observe(anchor, target_pos, cfg.channel, rng))
        trace.append((target_pos.copy(), ObservationSet(0, reports)))
    return trace


def _track(trace, cfg: StepsizeBenchConfig, fixed_alpha: float | None):
    """Run the estimator over a trace; fixed_alpha None means full adaptation,
    otherwise the step size is re-initialized to fixed_alpha every tick and the
    cross-tick adaptation is disabled (the inner-loop step discounting still
    applies in both cases)."""
    magd_cfg = cfg.magd
    state = None
    errs = []
    for true_pos, obs in trace:
        n_a = len(obs)
        if state is None:
            state = magd_init(magd_cfg, n_a, np.mean(obs.positions(), axis=0))
        state.t += 1
        if fixed_alpha is not None:
            state.alpha_hat = fixed_alpha
        conversions = [convert_error(r.measured_distance, r.reported_sigma_p,
                                     cfg.channel) for r in obs.reports]
        weights = error_weights([max(c.sigma_cd, 1e-9) for c in conversions])
        p_prev = state.p_hat.copy()
        _, d_bar, _ = magd_inner_descent(state, obs, conversions, weights,
                                         np.ones(n_a), magd_cfg)
        state.v_hist.append(float(np.linalg.norm(state.p_hat - p_prev)))
        state.d_hist.append(d_bar)
        if fixed_alpha is None:
            magd_adapt(state, magd_cfg, n_a)
        errs.append(float(np.linalg.norm(state.p_hat - true_pos)))
    return float(np.mean(errs))


def run_stepsize_benchmark(cfg: StepsizeBenchConfig):
    """Mean error per (n_anchors, estimator) cell; estimators are the fixed
    step sizes plus the adaptive-step column.  Returns a list of row dicts."""
    rows = []
    for na_idx, n_a in enumerate(cfg.n_anchors_grid):
        cell_errs = {f"alpha_{a:g}": [] for a in cfg.fixed_alphas}
        cell_errs["magd"] = []
        for rep in range(cfg.reps):
            rng = np.random.default_rng(
                np.random.SeedSequence([cfg.seed, na_idx, rep]))
            trace = _simulate_swarm_trace(n_a, cfg, rng)
            for a in cfg.fixed_alphas:
                cell_errs[f"alpha_{a:g}"].append(_track(trace, cfg, a))
            cell_errs["magd"].append(_track(trace, cfg, None))
        for name, vals in cell_errs.items():
            rows.append({"n_anchors": n_a, "estimator": name,
                         "mean_err_m": float(np.mean(vals))})
    return rows


def stepsize_summary(rows):
    """Per-estimator mean error across the n_anchors grid."""
    by_est = {}
    for row in rows:
        by_est.setdefault(row["estimator"], []).append(row["mean_err_m"])
    return {name: float(np.mean(v)) for name, v in by_est.items()}
