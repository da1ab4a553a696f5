"""Attack-mode tampering of anchor reports and attack-strategy scheduling."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError
from .model import AnchorReport


@dataclass
class AttackMode:
    """jamming | bias | manipulation with the matching index/bias parameter."""

    kind: str
    jamming_index: float = 5.0        # sigma_J^2
    bias: tuple = (200.0, 200.0, 5.0)  # position bias vector (m)
    manipulation_index: float = 200.0  # sigma_M^2

    def __post_init__(self):
        if self.kind not in ("jamming", "bias", "manipulation"):
            raise ConfigError(f"unknown attack mode {self.kind!r}")
        if self.jamming_index <= 0 or self.manipulation_index <= 0:
            raise ConfigError("attack indices must be positive")


@dataclass
class AttackStrategy:
    """random(rate) | coordinated(window, start) | stalking(victim)."""

    kind: str
    rate: float = 0.5          # Bernoulli rate for random attacks
    window: int = 50           # coordinated window length (timesteps)
    t_start: int | None = None  # default: centered in [1, T]
    victim_id: int | None = None

    def __post_init__(self):
        if self.kind not in ("random", "coordinated", "stalking"):
            raise ConfigError(f"unknown attack strategy {self.kind!r}")
        if not (0 <= self.rate <= 1):
            raise ConfigError("attack rate must be in [0, 1]")
        if self.window < 1:
            raise ConfigError("attack window must be >= 1")

    def window_start(self, total_steps: int) -> int:
        if self.t_start is not None:
            return self.t_start
        return (total_steps - self.window) // 2 + 1


@dataclass
class AttackerConfig:
    n_malicious: int
    mode: AttackMode
    strategy: AttackStrategy
    n_malicious_targets: int = 0
    enabled: bool = True  # False: stalkers still follow but never tamper


def attack_active(strategy: AttackStrategy, attacker_id: int, target_id: int,
                  t: int, rng: np.random.Generator, total_steps: int = 100) -> bool:
    """Whether the attacker tampers this link at timestep t."""
    if strategy.kind == "random":
        return bool(rng.random() < strategy.rate)
    if strategy.kind == "coordinated":
        start = strategy.window_start(total_steps)
        return start <= t < start + strategy.window
    # Stalking is a coordinated campaign: the pursuit aims at the victim, but
    # tampering hits whichever target the attacker currently serves as an
    # anchor for.  Third parties attacked en route build low reputations for
    # the stalkers and share them, which is what lets the propagation scheme
    # pre-warn the victim before a stalker's first tampered report.
    return True


def tamper_report(mode: AttackMode, honest: AnchorReport,
                  rng: np.random.Generator) -> AnchorReport:
    """Apply the attack mode to an honest report; never yields a negative
    reported distance."""
    if mode.kind == "bias":
        return replace(honest, reported_pos=honest.reported_pos + np.asarray(mode.bias, dtype=float))
    if mode.kind == "jamming":
        sj2 = mode.jamming_index
        pos = honest.reported_pos + rng.normal(0.0, math.sqrt(sj2 / 3.0), size=3)
        dist = max(0.0, honest.measured_distance + rng.uniform(0.0, sj2))
        sigma = honest.reported_sigma_p + math.sqrt(sj2)
        return AnchorReport(honest.anchor_id, pos, sigma, dist)
    # manipulation: zero-mean uniform position error plus an understated sigma
    sm2 = mode.manipulation_index
    half = sm2 / 3.0
    pos = honest.reported_pos + rng.uniform(-half, half, size=3)
    sigma = 1.0 / math.sqrt(sm2)
    return AnchorReport(honest.anchor_id, pos, sigma, honest.measured_distance)


def stalk_waypoint(victim_true_pos: np.ndarray) -> np.ndarray:
    """A stalker's mobility destination: the victim's current true position."""
    return np.asarray(victim_true_pos, dtype=float).copy()
