"""Exception hierarchy for the saesg engine.

Kept deliberately small: the CLI maps these onto exit codes, so every
failure path in the library raises one of the classes below.
"""


class SaesgError(Exception):
    """Base class for all engine errors."""


class DataError(SaesgError):
    """Malformed, misaligned or degenerate input data."""


class ConfigError(SaesgError):
    """Invalid run configuration."""


class FilterError(SaesgError):
    """A model filter left its domain (e.g. a log of a non-positive value).

    Carries the offending year when one can be named.
    """

    def __init__(self, message: str, year: int | None = None):
        super().__init__(message)
        self.year = year


class FitError(SaesgError):
    """Estimation failed (non-finite start, no convergent optimum, ...)."""


class SimulationError(SaesgError):
    """Scenario generation failed (non-finite propagation, bad request)."""
