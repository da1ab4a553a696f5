"""World-facing value types: UAV state, position measurement noise and the
composition of true state into the noisy broadcast an anchor sends out."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import RangingChannel, measure_distance
from .errors import ConfigError, DegenerateGeometryError


def vec3(x, y, z) -> np.ndarray:
    return np.array([x, y, z], dtype=float)


@dataclass
class PositionNoiseModel:
    """Bounds for the per-UAV position error std (m), drawn once at init."""

    sigma_min_p: float
    sigma_max_p: float

    def __post_init__(self):
        if not (0 <= self.sigma_min_p <= self.sigma_max_p):
            raise ConfigError("need 0 <= sigma_min_p <= sigma_max_p")

    def draw_sigma_p(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.sigma_min_p, self.sigma_max_p))


@dataclass
class UavState:
    id: int
    true_pos: np.ndarray
    sigma_p: float
    speed: float
    destination: np.ndarray
    role: str = "anchor"  # anchor | target
    malicious: bool = False

    def __post_init__(self):
        if self.sigma_p < 0:
            raise ConfigError("sigma_p must be non-negative")
        if self.speed < 0:
            raise ConfigError("speed must be non-negative")


@dataclass
class AnchorReport:
    """One anchor's broadcast as received by a target (possibly tampered)."""

    anchor_id: int
    reported_pos: np.ndarray
    reported_sigma_p: float
    measured_distance: float


def sample_position_offset(sigma_p: float, rng: np.random.Generator) -> np.ndarray:
    """Per-axis Gaussian position error; each axis has variance sigma_p^2 / 3
    so the total position-error variance equals sigma_p^2."""
    if sigma_p < 0:
        raise ValueError("sigma_p must be non-negative")
    return rng.normal(0.0, sigma_p / math.sqrt(3.0), size=3)


def observe(anchor: UavState, target_true_pos: np.ndarray, channel: RangingChannel,
            rng: np.random.Generator) -> AnchorReport:
    """Compose an honest anchor report: noisy self-reported position plus an
    RSSI-derived distance measurement to the target."""
    diff = np.asarray(target_true_pos, dtype=float) - anchor.true_pos
    true_d = float(np.linalg.norm(diff))
    if true_d == 0.0:
        raise DegenerateGeometryError(
            f"anchor {anchor.id} coincides with the target position")
    reported_pos = anchor.true_pos + sample_position_offset(anchor.sigma_p, rng)
    measured = measure_distance(channel, true_d, rng)
    return AnchorReport(
        anchor_id=anchor.id,
        reported_pos=reported_pos,
        reported_sigma_p=anchor.sigma_p,
        measured_distance=float(measured),
    )
