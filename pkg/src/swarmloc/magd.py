"""Mobility-adaptive gradient descent estimator.

Per timestep: a weighted, reputation-aware inner descent refines the position
estimate, then the step size adapts from estimated speed and residual trends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import RangingChannel
from .errors import ConfigError, NoTrustedAnchorError
from .localizers import ObservationSet, convert_error, error_weights

# Floor for converted sigmas used in weighting only (avoids division blowup
# when both the channel and a reported sigma_p are noise-free).
_WEIGHT_SIGMA_FLOOR = 1e-9


@dataclass
class MagdConfig:
    eps_max_t0: float = 50.0
    eps_min_t0: float = 5.0
    eps_min_t: float = 5.0
    beta1: float = 0.5
    beta2: float = 0.05
    momentum: float = 1e-5
    theta: float = 1e-8
    k_max: int = 30
    window: int = 5
    # Whether inner-loop beta1 reductions of alpha persist across timesteps.
    beta1_persists: bool = False

    def __post_init__(self):
        if not (self.eps_max_t0 >= self.eps_min_t0 > 0):
            raise ConfigError("need eps_max_t0 >= eps_min_t0 > 0")
        if not (0 < self.beta1 < 1):
            raise ConfigError("beta1 must be in (0, 1)")
        if self.beta2 < 0:
            raise ConfigError("beta2 must be non-negative")
        if not (0 <= self.momentum < 1):
            raise ConfigError("momentum must be in [0, 1)")
        if self.theta <= 0:
            raise ConfigError("theta must be positive")
        if self.k_max < 1 or self.window < 1:
            raise ConfigError("k_max and window must be >= 1")


@dataclass
class MagdState:
    p_hat: np.ndarray
    alpha_hat: float
    prev_step: np.ndarray = field(default_factory=lambda: np.zeros(3))
    v_hist: list = field(default_factory=list)
    d_hist: list = field(default_factory=list)
    t: int = 0
    coasting: bool = False
    last_iterations: int = 0


def magd_init(cfg: MagdConfig, n_anchors: int, p_init: np.ndarray) -> MagdState:
    """Initial estimator state; step size max(eps_max_t0 / n, eps_min_t0)."""
    if n_anchors < 1:
        raise NoTrustedAnchorError("cannot initialize without anchors")
    alpha = max(cfg.eps_max_t0 / n_anchors, cfg.eps_min_t0)
    return MagdState(p_hat=np.asarray(p_init, dtype=float).copy(), alpha_hat=alpha)


def magd_inner_descent(state: MagdState, obs: ObservationSet, conversions,
                       weights, reputations, cfg: MagdConfig):
    """Reputation-weighted inner descent (up to k_max iterations).

    Returns (p_hat, d_bar_final, iterations_used).  beta1 step reductions are
    scoped to this call unless cfg.beta1_persists is set.
    """
    positions = obs.positions()
    distances = obs.distances()
    mu = np.array([c.mu_cd for c in conversions], dtype=float)
    w = np.asarray(weights, dtype=float)
    r = np.asarray(reputations, dtype=float)
    wr = w * r
    # Count only anchors with effective weight so zero-reputation anchors are
    # bitwise-equivalent to their removal.
    n = int(np.sum(wr > 0))
    if n == 0:
        raise NoTrustedAnchorError("all anchors carry zero weight or reputation")

    p = state.p_hat.copy()
    alpha = state.alpha_hat
    prev_step = state.prev_step.copy()
    d_prev = math.inf
    d_bar = 0.0
    iterations = 0

    def ranges(point):
        rr = np.linalg.norm(point - positions, axis=1)
        return np.where(rr == 0.0, 1e-6, rr)

    for i in range(1, cfg.k_max + 1):
        iterations = i
        d_hat = ranges(p)
        resid = d_hat - distances + mu
        grad = np.sum(((resid * wr / d_hat)[:, None]) * (p - positions), axis=0)
        gnorm = np.linalg.norm(grad)
        if gnorm == 0.0:
            d_bar = float(np.sum(np.abs(resid) * wr)) / n
            break
        step = cfg.momentum * prev_step - (alpha / n) * grad / gnorm
        p = p + step
        prev_step = step
        d_hat = ranges(p)
        d_bar = float(np.sum(np.abs(d_hat - distances + mu) * wr)) / n
        if d_bar > d_prev:
            alpha *= cfg.beta1
        elif d_bar == 0.0 or (d_prev - d_bar) / d_bar <= cfg.theta:
            break
        d_prev = d_bar

    state.p_hat = p
    state.prev_step = prev_step
    state.last_iterations = iterations
    if cfg.beta1_persists:
        state.alpha_hat = alpha
    return p, d_bar, iterations


def magd_adapt(state: MagdState, cfg: MagdConfig, n_anchors: int) -> MagdState:
    """Per-timestep step-size adaptation from speed and residual histories.
    Expects v_hist and d_hist already extended for the current step."""
    t = state.t
    v_hist = np.asarray(state.v_hist, dtype=float)
    d_hist = np.asarray(state.d_hist, dtype=float)
    v_bar = float(np.mean(v_hist))
    dd_bar = float(np.mean(d_hist))
    phi = min(t, cfg.window)

    rho = None
    if dd_bar > 0 and v_bar > 0:
        rho_d = float(np.mean(d_hist[-phi:])) / dd_bar
        rho_v = float(np.mean(v_hist[-phi:])) / v_bar
        if rho_v > 0:
            rho = math.sqrt(rho_d / rho_v)

    if t != 1 and dd_bar > 0 and abs(d_hist[-1] - dd_bar) / dd_bar <= 0.5:
        state.alpha_hat -= cfg.beta2 * v_bar
        state.alpha_hat = max(state.alpha_hat,
                              max(cfg.eps_min_t / max(n_anchors, 1), v_bar / 2.0))
    if t != 1 and rho is not None and rho > 1.5:
        state.alpha_hat *= rho
    # The multiplicative enlargement is unbounded in principle; cap at the
    # initialization level (the step the algorithm itself considers safe when
    # the error is largest) so residual spikes -- sparse-anchor stretches,
    # tampered reports -- cannot compound it into estimate-destroying jumps.
    state.alpha_hat = min(state.alpha_hat,
                          max(cfg.eps_max_t0 / max(n_anchors, 1), cfg.eps_min_t0))
    return state


def magd_tick(state: MagdState, obs: ObservationSet | None, reputations,
              channel: RangingChannel, cfg: MagdConfig) -> np.ndarray:
    """One estimator timestep: error conversion, weighting, inner descent and
    step-size adaptation.  With no usable anchors the previous estimate is
    held and the coasting flag is set."""
    state.t += 1
    if obs is None or len(obs) == 0:
        state.coasting = True
        state.last_iterations = 0
        state.v_hist.append(0.0)
        state.d_hist.append(state.d_hist[-1] if state.d_hist else 0.0)
        return state.p_hat

    conversions = [convert_error(rep.measured_distance, rep.reported_sigma_p, channel)
                   for rep in obs.reports]
    sigmas = np.array([max(c.sigma_cd, _WEIGHT_SIGMA_FLOOR) for c in conversions])
    weights = error_weights(sigmas)
    reputations = np.asarray(reputations, dtype=float)

    if not np.any(weights * reputations > 0):
        state.coasting = True
        state.last_iterations = 0
        state.v_hist.append(0.0)
        state.d_hist.append(state.d_hist[-1] if state.d_hist else 0.0)
        return state.p_hat

    state.coasting = False
    p_prev = state.p_hat.copy()
    _, d_bar, _ = magd_inner_descent(state, obs, conversions, weights,
                                     reputations, cfg)
    state.v_hist.append(float(np.linalg.norm(state.p_hat - p_prev)))
    state.d_hist.append(d_bar)
    n_eff = int(np.sum(weights * reputations > 0))
    magd_adapt(state, cfg, n_eff)
    return state.p_hat
