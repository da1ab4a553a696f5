"""RSSI ranging channel: log-distance path loss, dB-domain measurement noise
and the derived distance-error standard deviation table sigma_d(d).

The measurement chain is: evaluate the path-loss curve at the true distance,
add a zero-mean Gaussian dB error whose std is distance-dependent, then invert
the path-loss curve.  The resulting meter-domain error is multiplicative, so
measured distances are always strictly positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

# Derivation seed for sigma_d tables; recorded in run manifests so the table
# lookup is reproducible independently of the scenario seed.
SIGMA_D_TABLE_SEED = 7771
DEFAULT_TABLE_D_MAX = 200.0
DEFAULT_TABLE_SAMPLES = 20_000


@dataclass
class SigmaDTable:
    """Tabulated std of the distance measurement error over a distance grid."""

    d_grid: np.ndarray
    sigma: np.ndarray
    seed: int = SIGMA_D_TABLE_SEED

    def __post_init__(self):
        self.d_grid = np.asarray(self.d_grid, dtype=float)
        self.sigma = np.asarray(self.sigma, dtype=float)
        if self.d_grid.size == 0:
            raise ConfigError("empty sigma_d grid")
        if np.any(np.diff(self.d_grid) <= 0) or self.d_grid[0] <= 0:
            raise ConfigError("sigma_d grid must be strictly increasing and positive")
        if np.any(self.sigma < 0):
            raise ConfigError("sigma_d values must be non-negative")

    def __call__(self, d):
        """Linearly interpolated sigma_d at distance(s) d."""
        return np.interp(d, self.d_grid, self.sigma)

    def to_csv(self, path):
        rows = np.column_stack([self.d_grid, self.sigma])
        np.savetxt(path, rows, delimiter=",", header="d_m,sigma_d_m", comments="")


@dataclass
class RangingChannel:
    """Path-loss model parameters plus the RSSI error law.

    rssi(d) = pr_d0 - 10 * n_p * log10(d / d0)
    dB error ~ N(0, sigma_r(d)^2),  sigma_r(d) = (S*d^2 + 1) * U(smin, smax)
    """

    n_p: float = 3.0
    d0: float = 1.0
    pr_d0: float = -30.0
    sigma_min_r: float = 0.5
    sigma_max_r: float = 2.0
    S: float = 1e-4
    sigma_d_table: SigmaDTable | None = field(default=None, repr=False, compare=False)
    # convert_error results keyed by quantized (distance, sigma_p)
    _conv_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.n_p <= 0:
            raise ConfigError("path-loss exponent must be positive")
        if self.d0 <= 0:
            raise ConfigError("reference distance must be positive")
        if not (0 <= self.sigma_min_r <= self.sigma_max_r):
            raise ConfigError("need 0 <= sigma_min_r <= sigma_max_r")
        if self.S < 0:
            raise ConfigError("scaling factor S must be non-negative")

    def params_key(self):
        return (self.n_p, self.d0, self.pr_d0, self.sigma_min_r, self.sigma_max_r, self.S)

    def sigma_d(self, d):
        """sigma_d(d) from the table, building the default table on first use."""
        if self.sigma_d_table is None:
            self.sigma_d_table = default_sigma_d_table(self)
        return self.sigma_d_table(d)


def rssi_at_distance(channel: RangingChannel, d):
    """Mean RSSI (dBm) at distance d (m) from the log-distance model."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    out = channel.pr_d0 - 10.0 * channel.n_p * np.log10(d / channel.d0)
    return float(out) if out.ndim == 0 else out


def invert_rssi(channel: RangingChannel, rssi):
    """Distance (m) whose mean RSSI equals the given value; exact inverse
    of :func:`rssi_at_distance`."""
    rssi = np.asarray(rssi, dtype=float)
    out = channel.d0 * 10.0 ** ((channel.pr_d0 - rssi) / (10.0 * channel.n_p))
    return float(out) if out.ndim == 0 else out


def gamma_d(channel: RangingChannel, d):
    """Distance modification factor applied to the RSSI error std."""
    d = np.asarray(d, dtype=float)
    return channel.S * d**2 + 1.0


def sample_rssi_sigma(channel: RangingChannel, d, rng: np.random.Generator):
    """Draw sigma_r(d) = gamma_d * U(sigma_min_r, sigma_max_r), fresh per call."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    u = rng.uniform(channel.sigma_min_r, channel.sigma_max_r, size=d.shape)
    out = gamma_d(channel, d) * u
    return float(out) if out.ndim == 0 else out


def measure_distance(channel: RangingChannel, true_d, rng: np.random.Generator):
    """Measured distance: add Gaussian dB noise to the mean RSSI at true_d and
    invert the path-loss curve.  Strictly positive by construction."""
    true_d = np.asarray(true_d, dtype=float)
    if np.any(true_d <= 0):
        raise ValueError("distance must be positive")
    sigma = sample_rssi_sigma(channel, true_d, rng)
    delta_p = rng.normal(0.0, 1.0, size=true_d.shape) * sigma
    out = invert_rssi(channel, rssi_at_distance(channel, true_d) + delta_p)
    return float(out) if np.ndim(out) == 0 else out


def build_sigma_d_table(channel: RangingChannel, d_grid, samples_per_point=DEFAULT_TABLE_SAMPLES,
                        rng: np.random.Generator | None = None,
                        seed: int = SIGMA_D_TABLE_SEED) -> SigmaDTable:
    """Monte-Carlo table of sigma_d(d) = std(measured - true) per grid point."""
    d_grid = np.asarray(d_grid, dtype=float)
    if d_grid.size == 0:
        raise ConfigError("empty sigma_d grid")
    if samples_per_point < 1:
        raise ConfigError("samples_per_point must be >= 1")
    if rng is None:
        rng = np.random.default_rng(seed)
    sigma = np.empty_like(d_grid)
    for i, d in enumerate(d_grid):
        draws = measure_distance(channel, np.full(samples_per_point, d), rng)
        sigma[i] = np.std(draws - d)
    return SigmaDTable(d_grid, sigma, seed=seed)


_TABLE_CACHE: dict = {}


def default_sigma_d_table(channel: RangingChannel) -> SigmaDTable:
    """Default table: 1 m spacing over (0, 200], cached per channel parameters."""
    key = channel.params_key()
    if key not in _TABLE_CACHE:
        grid = np.arange(1.0, DEFAULT_TABLE_D_MAX + 1.0)
        _TABLE_CACHE[key] = build_sigma_d_table(channel, grid)
    return _TABLE_CACHE[key]
