"""Trust-based defense: per-neighbor reputation from residual plausibility
(time-evolving anomaly detection) and cloud-blended reputation propagation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .errors import ConfigError
from .localizers import ConvertedError
from .model import AnchorReport


@dataclass
class TadConfig:
    lambda_r: float = 0.3
    lambda_p: float = -0.7
    gamma: float = 0.5
    eps_t: float = 0.95
    sigma_p_min: float = 0.1
    # Use the uncorrected recursive update r = gamma*(r+1) - 1 + rhat instead
    # of the recovering form; kept for comparison runs.
    printed_update: bool = False

    def __post_init__(self):
        if not (self.lambda_r >= 0 >= self.lambda_p):
            raise ConfigError("need lambda_r >= 0 >= lambda_p")
        if not (0 < self.gamma <= 1):
            raise ConfigError("gamma must be in (0, 1]")
        if not (0 < self.eps_t < 1):
            raise ConfigError("eps_t must be in (0, 1)")
        if self.sigma_p_min <= 0:
            raise ConfigError("sigma_p_min must be positive")


@dataclass
class ReputationTable:
    """Per-target map neighbor id -> reputation in [0, 1]; unseen default 1."""

    owner_id: int
    values: dict = field(default_factory=dict)

    def get(self, neighbor_id: int) -> float:
        return self.values.get(neighbor_id, 1.0)

    def set(self, neighbor_id: int, r: float):
        self.values[neighbor_id] = float(min(1.0, max(0.0, r)))

    def snapshot(self) -> dict:
        return dict(self.values)


@dataclass
class CloudRegistry:
    """Shared registry of the last uploaded reputation table per UAV."""

    snapshots: dict = field(default_factory=dict)  # uploader -> (t, {nbr: r})

    def upload(self, uploader_id: int, table: dict, t: int):
        self.snapshots[uploader_id] = (t, dict(table))

    def get(self, uploader_id: int):
        return self.snapshots.get(uploader_id)


def plausibility(e_hat: float, conv: ConvertedError) -> float:
    """P(|X| <= e_hat) for X ~ N(mu_cd, sigma_cd^2) (folded-normal CDF)."""
    if conv.sigma_cd <= 0:
        raise ValueError("sigma_cd must be positive")
    if e_hat < 0:
        raise ValueError("e_hat must be non-negative")
    s = conv.sigma_cd
    return float(ndtr((e_hat - conv.mu_cd) / s) - ndtr((-e_hat - conv.mu_cd) / s))


def tad_update(table: ReputationTable, report: AnchorReport, p_hat: np.ndarray,
               conv: ConvertedError, cfg: TadConfig) -> float:
    """One anomaly-detection pass for a neighbor: score the residual against
    its converted error distribution, then reward or penalize."""
    sigma = max(conv.sigma_cd, cfg.sigma_p_min)
    d_hat = float(np.linalg.norm(np.asarray(p_hat, dtype=float) - report.reported_pos))
    e_hat = abs(d_hat - report.measured_distance + conv.mu_cd)
    xi = plausibility(e_hat, ConvertedError(conv.mu_cd, sigma))
    r_hat = cfg.lambda_p if xi > cfg.eps_t else cfg.lambda_r
    prev = table.get(report.anchor_id)
    if cfg.printed_update:
        r = cfg.gamma * (prev + 1.0) - 1.0 + r_hat
    else:
        r = cfg.gamma * (prev - 1.0) + 1.0 + r_hat
    table.set(report.anchor_id, r)
    return table.get(report.anchor_id)


def propagation_function(x: float) -> float:
    """Convex discriminator applied to propagated reputations."""
    return x * x


def propagate_reputation(local: ReputationTable, cloud: CloudRegistry,
                         neighbor_id: int, f_p=propagation_function) -> float:
    """Blend the local reputation of a neighbor with cloud-shared opinions,
    each informant discounted by its own local reputation."""
    local_r = local.get(neighbor_id)
    num = 0.0
    den = 0.0
    for uploader_id, (_, snap) in cloud.snapshots.items():
        if uploader_id in (local.owner_id, neighbor_id):
            continue
        if neighbor_id not in snap:
            continue
        # Informant credibility must be earned: an uploader the owner has
        # never ranged with carries no weight.  (The default-1 reputation is
        # for measurement weighting, not for vouching for third parties --
        # otherwise a never-met malicious uploader poisons the pool at full
        # credibility.)
        if uploader_id not in local.values:
            continue
        r_km = local.get(uploader_id)
        num += r_km * snap[neighbor_id]
        den += r_km
    if den == 0.0:
        return local_r
    r_tilde = num / den
    blended = (f_p(r_tilde) + local_r) / 2.0
    return float(min(1.0, max(0.0, blended)))


def upload_reputation(table: ReputationTable, cloud: CloudRegistry, t: int,
                      invert: bool = False):
    """Publish the owner's table to the cloud; a malicious uploader shares the
    inverted table instead."""
    snap = table.snapshot()
    if invert:
        snap = {k: 1.0 - v for k, v in snap.items()}
    cloud.upload(table.owner_id, snap, t)
