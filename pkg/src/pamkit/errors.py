"""Exception hierarchy shared by all pamkit modules.

The CLI maps each family onto an exit code, so new errors should derive
from one of the three families below rather than from ``PamError``.
"""


class PamError(Exception):
    """Base class for all pamkit errors."""


class ConfigError(PamError, ValueError):
    """Invalid user input: unknown model, bad grid, malformed config."""


class UnsupportedModelError(ConfigError):
    pass


class InvalidFieldPointError(ConfigError):
    pass


class InvalidDecimationError(ConfigError):
    pass


class FormatError(PamError):
    """A binary file could not be decoded.

    Args:
        message: Human readable description.
        offset: Byte offset at which decoding failed, if known.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class UnsupportedVersionError(FormatError):
    pass


class NumericalError(PamError, ArithmeticError):
    """A numerical procedure failed to produce a valid result."""


class SimulationDivergedError(NumericalError):
    pass


class InfeasibleError(NumericalError):
    pass


class DegenerateMaskError(NumericalError):
    pass


class UndefinedMetricError(NumericalError):
    pass


class PixelError(NumericalError):
    """Wraps a per-pixel failure with the pixel coordinates attached."""

    def __init__(self, x, z, cause):
        super().__init__(f"pixel at x={x * 1e3:.3f} mm, z={z * 1e3:.3f} mm: {cause}")
        self.x = x
        self.z = z
        self.cause = cause


class RateMismatchError(ConfigError):
    pass


class InfeasibleEpsilonError(ConfigError):
    pass


class ZeroPowerError(NumericalError):
    """Raised when noise cannot be scaled to an SNR because the signal is zero."""
