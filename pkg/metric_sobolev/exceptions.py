"""
Exceptions raised by metric_sobolev.

Violations that a diagnostic is meant to measure (metric defects,
inequality residuals) are report content and are never raised.
"""

from typing import Any, Optional


class MetricSobolevError(Exception):
    """Base for all package errors."""


class InvalidParameterError(MetricSobolevError, ValueError):
    """A numeric parameter is outside its admissible range."""


class SpaceFormatError(MetricSobolevError, ValueError):
    """A space, curve or ball file cannot be parsed."""


class MetricViolationError(SpaceFormatError):
    """A distance table breaks a metric axiom.

    Parameters
    ----------
    message : str
    witness : tuple of str
        Point identifiers of the violating pair or triple.
    """

    def __init__(self, message: str, witness: tuple[str, ...]) -> None:
        super().__init__(message)
        self.witness = witness


class DisconnectedGraphError(InvalidParameterError):
    """The shortest-path metric of a graph is undefined."""


class MismatchError(MetricSobolevError, ValueError):
    """Fields, partitions and spaces do not belong together."""


class EmptyCellError(MetricSobolevError, ValueError):
    """A partition cell carries zero total mass."""

    def __init__(self, cell: int) -> None:
        super().__init__(f"Cell {cell} has zero total mass; its mean is undefined.")
        self.cell = cell


class ConvergenceError(MetricSobolevError, RuntimeError):
    """An inner solver stopped before reaching its tolerance.

    Parameters
    ----------
    message : str
    last_iterate : Any
        Last iterate produced by the solver.
    residual : float
        Gradient norm at the last iterate.
    """

    def __init__(
        self, message: str, last_iterate: Optional[Any] = None, residual: float = float("nan")
    ) -> None:
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


class ConfigurationError(MetricSobolevError, ValueError):
    """An experiment configuration or manifest is invalid."""
