"""Baseline position solvers (least squares, L1-ADMM, gradient descent),
position->distance error conversion and anchor error weighting."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import RangingChannel
from .errors import ConfigError, SingularGeometryError
from .model import AnchorReport

CONVERT_ERROR_SAMPLES = 20_000
CONVERT_ERROR_SEED = 90210


@dataclass
class ObservationSet:
    target_id: int
    reports: list[AnchorReport]

    def __post_init__(self):
        ids = [r.anchor_id for r in self.reports]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate anchor ids in observation set")

    def positions(self) -> np.ndarray:
        return np.array([r.reported_pos for r in self.reports], dtype=float)

    def distances(self) -> np.ndarray:
        return np.array([r.measured_distance for r in self.reports], dtype=float)

    def __len__(self):
        return len(self.reports)


@dataclass
class AdmmConfig:
    rho: float = 0.1
    k_admm: int = 100

    def __post_init__(self):
        if self.rho <= 0:
            raise ConfigError("rho must be positive")
        if self.k_admm < 1:
            raise ConfigError("k_admm must be >= 1")


@dataclass
class GdConfig:
    alpha0: float = 1.0
    beta: float = 0.5
    k_gd: int = 30

    def __post_init__(self):
        if self.alpha0 <= 0:
            raise ConfigError("alpha0 must be positive")
        if not (0 < self.beta < 1):
            raise ConfigError("beta must be in (0, 1)")
        if self.k_gd < 1:
            raise ConfigError("k_gd must be >= 1")


@dataclass
class ConvertedError:
    """Gaussian approximation (mean, std) of the combined distance residual
    caused by anchor position error plus ranging error."""

    mu_cd: float
    sigma_cd: float


def _linear_system(positions: np.ndarray, distances: np.ndarray):
    """Build the linearized multilateration system A theta = b with
    theta = [x, y, z, ||p||^2]."""
    a = np.column_stack([-2.0 * positions, np.ones(len(positions))])
    b = distances**2 - np.sum(positions**2, axis=1)
    return a, b


def localize_ls(obs: ObservationSet) -> np.ndarray:
    """Closed-form least-squares multilateration; needs >= 4 non-coplanar anchors."""
    if len(obs) < 4:
        raise SingularGeometryError("need at least 4 anchors for the LS solver")
    a, b = _linear_system(obs.positions(), obs.distances())
    if np.linalg.matrix_rank(a) < 4:
        raise SingularGeometryError("coplanar/collinear anchors: A is rank deficient")
    theta, *_ = np.linalg.lstsq(a, b, rcond=None)
    return theta[:3]


def soft_threshold(x, k):
    """Shrink x toward zero by k (proximal map of the L1 norm)."""
    if k <= 0:
        raise ValueError("threshold must be positive")
    x = np.asarray(x, dtype=float)
    out = np.sign(x) * np.maximum(np.abs(x) - k, 0.0)
    return float(out) if out.ndim == 0 else out


def localize_l1_admm(obs: ObservationSet, cfg: AdmmConfig) -> np.ndarray:
    """Plane-fitting formulation min ||w||_1 s.t. A u - w = b, solved by ADMM."""
    if len(obs) < 4:
        raise SingularGeometryError("need at least 4 anchors for the L1 solver")
    a, b = _linear_system(obs.positions(), obs.distances())
    if np.linalg.matrix_rank(a) < 4:
        raise SingularGeometryError("coplanar/collinear anchors: A is rank deficient")
    gat = np.linalg.solve(a.T @ a, a.T)
    w = np.zeros_like(b)
    lam = np.zeros_like(b)
    u = np.zeros(4)
    for _ in range(cfg.k_admm):
        u = gat @ (b + w - lam / cfg.rho)
        w = soft_threshold(a @ u - b + lam / cfg.rho, 1.0 / cfg.rho)
        lam = lam + cfg.rho * (a @ u - w - b)
    return u[:3]


def _gd_cost_grad(p: np.ndarray, positions: np.ndarray, distances: np.ndarray):
    """Cost 0.5 * sum (||p - p_n|| - d_n)^2 and its gradient at p.

    A point coinciding with an anchor is perturbed by 1e-6 m to avoid the
    gradient singularity."""
    diff = p - positions
    rng_norm = np.linalg.norm(diff, axis=1)
    if np.any(rng_norm == 0.0):
        p = p + 1e-6
        diff = p - positions
        rng_norm = np.linalg.norm(diff, axis=1)
    resid = rng_norm - distances
    cost = 0.5 * float(np.sum(resid**2))
    grad = np.sum((resid / rng_norm)[:, None] * diff, axis=0)
    return cost, grad


def localize_gd(obs: ObservationSet, cfg: GdConfig, start: np.ndarray) -> np.ndarray:
    """Normalized-step gradient descent on the smooth squared-residual cost,
    with the step discounted by beta whenever the cost increases."""
    if len(obs) < 1:
        raise SingularGeometryError("need at least 1 anchor")
    positions = obs.positions()
    distances = obs.distances()
    p = np.asarray(start, dtype=float).copy()
    alpha = cfg.alpha0
    prev_cost, _ = _gd_cost_grad(p, positions, distances)
    for _ in range(cfg.k_gd):
        _, grad = _gd_cost_grad(p, positions, distances)
        gnorm = np.linalg.norm(grad)
        if gnorm == 0.0:
            break
        candidate = p - alpha * grad / gnorm
        cost, _ = _gd_cost_grad(candidate, positions, distances)
        if cost > prev_cost:
            # over-descended: discount the step and keep the current point
            alpha *= cfg.beta
        else:
            p = candidate
            prev_cost = cost
    return p


def convert_error(d_meas: float, sigma_p: float, channel: RangingChannel) -> ConvertedError:
    """Moment-matched Gaussian of the combined residual: the geometric
    distance perturbation from the anchor's position error minus the ranging
    error, evaluated at the measured distance.

    Deterministic: a fixed derivation seed is used and results are cached on a
    grid quantized to 1 m in distance and 0.1 m in sigma_p."""
    if d_meas <= 0:
        raise ValueError("measured distance must be positive")
    if sigma_p < 0:
        raise ValueError("sigma_p must be non-negative")
    dq = max(1.0, float(round(d_meas)))
    sq = round(float(sigma_p), 1)
    sigma_d = float(channel.sigma_d(dq))
    if sq == 0.0:
        return ConvertedError(0.0, sigma_d)
    key = (dq, sq)
    cached = channel._conv_cache.get(key)
    if cached is not None:
        return cached
    seq = np.random.SeedSequence([CONVERT_ERROR_SEED, int(dq), int(round(sq * 10))])
    rng = np.random.default_rng(seq)
    offsets = rng.normal(0.0, sq / math.sqrt(3.0), size=(CONVERT_ERROR_SAMPLES, 3))
    offsets[:, 0] += dq
    zeta = np.linalg.norm(offsets, axis=1) - dq
    ranging = rng.normal(0.0, sigma_d, size=CONVERT_ERROR_SAMPLES)
    combined = zeta - ranging
    out = ConvertedError(float(np.mean(combined)), float(np.std(combined)))
    channel._conv_cache[key] = out
    return out


def error_weights(sigmas_cd) -> np.ndarray:
    """Inverse-sigma anchor weights w_n = sum(sigma) / (n * sigma_n); the
    reciprocals sum to n by construction."""
    sigmas = np.asarray(sigmas_cd, dtype=float)
    if np.any(sigmas <= 0):
        raise ValueError("all sigmas must be positive")
    return np.sum(sigmas) / (len(sigmas) * sigmas)
