"""Error taxonomy shared by all dnmap modules.

Every failure mode a caller is expected to branch on gets its own class.
The CLI maps these onto exit codes (config -> 2, validation -> 3,
numerical -> 4); library users catch them directly.
"""

from __future__ import annotations


class DnmapError(Exception):
    """Base class for all dnmap errors."""


class ConfigError(DnmapError):
    """A problem file or run configuration could not be parsed."""


class ConstraintError(DnmapError):
    """Input violates a structural constraint (degree, parity, index sets)."""


class DomainError(DnmapError):
    """An argument is outside the mathematical domain of an operation."""


class ModeError(DnmapError):
    """A map was requested in a mode its dispersion does not support."""


class GeometryError(DnmapError):
    """Sector/branch geometry failed (wrong branch count, bad seeding radius)."""


class RefinementError(DnmapError):
    """Branch tracking was ambiguous; denser sampling is required."""

    def __init__(self, message: str, suggested_factor: int = 4) -> None:
        super().__init__(message)
        self.suggested_factor = suggested_factor


class ConvergenceError(DnmapError):
    """A quadrature or series did not reach its error target."""


class UnsupportedConfigurationError(DnmapError):
    """The problem is valid but outside what the implementation supports."""


class NumericalError(DnmapError):
    """An internal numerical consistency check failed."""
