"""Exception types shared across the simulator."""


class CfmimoError(Exception):
    """Base class for all simulator errors."""


class ConfigurationError(CfmimoError):
    """Invalid or inconsistent scenario configuration."""


class GeometryError(CfmimoError):
    """Degenerate geometry (non-positive distance, user on top of an antenna, ...)."""


class OutOfModelError(CfmimoError):
    """Input outside the validity range of an empirical propagation model."""


class NumericalError(CfmimoError):
    """Numerical breakdown (ill-conditioned solve, negative variance, ...)."""
