"""Exception types shared across the simulator."""


class SwarmlocError(Exception):
    """Base class for all simulator errors."""


class ConfigError(SwarmlocError):
    """Invalid or inconsistent scenario configuration."""


class SingularGeometryError(SwarmlocError):
    """Anchor geometry is rank-deficient (coplanar/collinear anchors)."""


class DegenerateGeometryError(SwarmlocError):
    """Coincident positions where a distance is required."""


class NoTrustedAnchorError(SwarmlocError):
    """Every available anchor has zero effective weight."""
