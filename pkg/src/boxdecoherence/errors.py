"""Exception hierarchy shared by all modules."""


class BoxDecoherenceError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(BoxDecoherenceError, ValueError):
    """Invalid configuration value, unknown key, or malformed config file."""


class TailLeakError(BoxDecoherenceError, ValueError):
    """The Gaussian packet does not fit inside the box."""


class GridMismatchError(BoxDecoherenceError, ValueError):
    """Two objects defined on different grids were combined."""


class InvalidPartitionError(BoxDecoherenceError, ValueError):
    """Block partition has gaps, overlaps, or does not cover the grid."""


class NonHermitianError(BoxDecoherenceError, ValueError):
    """Kernel handed to the eigensolver is not Hermitian."""


class NoConvergenceError(BoxDecoherenceError, RuntimeError):
    """Eigensolver iteration failed; indicates a numerics bug, not bad data."""
