"""Exception hierarchy shared by all robustmean modules."""

from __future__ import annotations


class RobustMeanError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(RobustMeanError):
    """Invalid configuration file, flag combination, or roster entry."""


class DomainError(RobustMeanError):
    """Input outside the mathematical domain of an operation."""


class InfiniteEndpointError(DomainError):
    """Quantile requested at an unbounded endpoint of the support."""


class MomentDivergenceError(DomainError):
    """A requested moment does not exist.

    ``order`` names the first divergent moment order.
    """

    def __init__(self, message: str, order: int):
        super().__init__(message)
        self.order = order


class RangeError(DomainError):
    """Target value outside the attainable range; carries the interval."""

    def __init__(self, message: str, attainable: tuple[float, float]):
        super().__init__(message)
        self.attainable = attainable


class OverTrimError(DomainError):
    """Trim proportions leave no retained core."""


class GeometryError(DomainError):
    """Block layout does not fit inside the sample."""


class ParameterError(DomainError):
    """Invalid estimator parameter; may carry a suggested nearest value."""

    def __init__(self, message: str, suggestion: float | None = None):
        super().__init__(message)
        self.suggestion = suggestion


class ResolutionError(DomainError):
    """Grid too coarse for the requested finite-difference order."""


class PrecisionError(DomainError):
    """Requested statistical precision unattainable with the given budget."""


class UnsupportedDimensionError(DomainError):
    """Sobol dimension exceeds the supported table width."""


class UnsupportedParameterError(DomainError):
    """Parameter regime intentionally not covered by this implementation."""


class CapacityError(RobustMeanError):
    """Exact enumeration would exceed the evaluation cap."""
