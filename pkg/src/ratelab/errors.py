"""Error taxonomy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DataError (and
subclasses) -> 3, anything else raised from inside a command -> 4.
"""
from __future__ import annotations


class RatelabError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(RatelabError):
    """Invalid configuration: bad field values, unknown keys, bad CLI args."""


class DataError(RatelabError):
    """Input data violates a precondition of the requested computation."""


class DegenerateThresholdError(DataError):
    """Resolved rating cutoffs collapsed (c1 >= c2)."""


class DegenerateColumnError(DataError):
    """A design column has zero variance where standardization is required."""


class SingularDesignError(DataError):
    """Design matrix is numerically rank-deficient."""


class InsufficientDataError(DataError):
    """Not enough rows/groups remain to run the requested analysis."""


class ExhaustionError(RatelabError):
    """A recommender ran out of candidate items for some user."""
