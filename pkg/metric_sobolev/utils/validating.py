"""
Module for validating general function inputs.
"""

import math
from collections.abc import Iterable, Sequence
from typing import Any, Type, TypeVar, Union

from ..exceptions import InvalidParameterError

Key = TypeVar("Key")
Value = TypeVar("Value")


def sort_dict_by_keys(unsorted_dict: dict[Key, Value]) -> dict[Key, Value]:
    """Sorts a dictionary by key values."""

    return dict(map(tuple, sorted(unsorted_dict.items())))


def is_all_type(
    objects: Iterable[Any], types: Union[Type[Any], tuple[Union[Type[Any], None], ...]]
) -> bool:
    """Validate that iterable only contains objects of a given type or types.

    Parameters
    ----------
    objects : Iterable of Any
        Iterable of objects to type-check.
    types : type or tuple of types

    Returns
    -------
    bool

    Examples
    --------
    >>> is_all_type([1,2,3,4], int)
    True
    >>> is_all_type(["hello", "world", 123], (str, int))
    False
    """

    return all(isinstance(obj, types) for obj in objects)


def validate_positive(name: str, value: Any) -> float:
    """Return value as a float, raising unless it is finite and > 0.

    Examples
    --------
    >>> validate_positive("delta", 0.5)
    0.5
    >>> validate_positive("delta", 0)
    Traceback (most recent call last):
        ...
    metric_sobolev.exceptions.InvalidParameterError: delta must be a positive real, not '0'.
    """

    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError(f"{name} must be of type float, not '{type(value)}'.")
    if not math.isfinite(value) or value <= 0:
        raise InvalidParameterError(f"{name} must be a positive real, not '{value}'.")
    return float(value)


def validate_exponent(name: str, value: Any, lower: float = 1.0) -> float:
    """Return value as a float, raising unless it is finite and > lower."""

    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError(f"{name} must be of type float, not '{type(value)}'.")
    if not math.isfinite(value) or value <= lower:
        raise InvalidParameterError(f"{name} must be greater than {lower}, not '{value}'.")
    return float(value)


def validate_count(name: str, value: Any, minimum: int) -> int:
    """Return value, raising unless it is an int >= minimum."""

    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"{name} must be of type int, not '{type(value)}'.")
    if value < minimum:
        raise InvalidParameterError(f"{name} must be at least {minimum}, not '{value}'.")
    return value


def is_strictly_increasing(values: Sequence[float]) -> bool:
    """Check that consecutive entries strictly increase."""

    return all(a < b for a, b in zip(values, values[1:]))


def is_strictly_decreasing(values: Sequence[float]) -> bool:
    """Check that consecutive entries strictly decrease."""

    return all(a > b for a, b in zip(values, values[1:]))


def validate_save_filename(filename: str) -> str:
    """Remove quotations from filename, replace spaces with underscore."""
    return filename.replace('"', "").replace("'", "").replace(" ", "_")
