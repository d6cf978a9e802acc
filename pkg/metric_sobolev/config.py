"""
Experiment configuration and environment-driven settings.
"""

import dataclasses
import math
import os
import re
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any, Optional

from .exceptions import ConfigurationError
from .utils.validating import is_all_type, is_strictly_increasing

THREADS_ENV_VAR = "METRIC_SOBOLEV_THREADS"
OUTPUT_FORMATS = ("csv", "json")
FIELD_NAMES = ("abs-kink", "constant", "indicator", "linear", "random", "sin")
_SPEC = re.compile(r"^\s*[A-Za-z_][\w-]*\s*(\(.*\))?\s*$")


def max_threads() -> int:
    """Number of experiments a manifest may run at once.

    Read from ``METRIC_SOBOLEV_THREADS``; unset, empty or invalid values
    fall back to a single thread.
    """

    raw = os.environ.get(THREADS_ENV_VAR, "").strip()
    try:
        threads = int(raw)
    except ValueError:
        return 1
    return max(threads, 1)


def _positive_list(name: str, values: Any) -> tuple[float, ...]:
    if isinstance(values, str):
        values = [value for value in values.split(",") if value.strip()]
    try:
        values = tuple(float(value) for value in values)
    except (TypeError, ValueError) as bad_value:
        raise ConfigurationError(f"{name} must be a list of numbers, not '{values}'.") from bad_value
    if not all(math.isfinite(value) and value > 0 for value in values):
        raise ConfigurationError(f"{name} must be positive reals, not {list(values)}.")
    return values


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything an experiment run needs.

    Parameters
    ----------
    experiment : str
        Registered experiment name, e.g. ``"energy-ladder"``.
    space : str
        Generator spec such as ``"interval(2000)"`` or a space file.
    field : str, optional (default="sin")
        Field spec or a JSON file of values.
    q, p : float, optional (default=2.0)
        Sobolev and Hopf-Lax exponents.
    deltas, times : tuple of float, optional
        Scale ladder and time grid; empty means experiment defaults.
    seed : int, optional (default=0)
        Fixes every random choice of the run.
    out : str, optional (default="results")
        Output directory.
    output_format : {'json', 'csv'}
    tau : float, optional (default=0.01)
        Flow time step.
    steps : int, optional (default=10)
        Flow steps.
    curves, balls : str, optional
        Curve file (JSON) and ball grid file (CSV).
    pairs : int, optional (default=100)
        Number of random pairs or curves.
    lambda_ : float, optional (default=1.0)
        Poincare dilation.
    radius : float, optional
        Locality radius for slope estimates; experiment default if None.

    Raises
    ------
    ConfigurationError
        Any invalid value or missing referenced file.
    """

    experiment: str
    space: str
    field: str = "sin"
    q: float = 2.0
    p: float = 2.0
    deltas: tuple[float, ...] = ()
    times: tuple[float, ...] = ()
    seed: int = 0
    out: str = "results"
    output_format: str = "json"
    tau: float = 0.01
    steps: int = 10
    curves: Optional[str] = None
    balls: Optional[str] = None
    pairs: int = 100
    lambda_: float = 1.0
    radius: Optional[float] = None

    def __post_init__(self) -> None:
        if not is_all_type((self.experiment, self.space, self.field, self.out), str):
            raise ConfigurationError("experiment, space, field and out must be strings.")
        if not os.path.isfile(self.space) and not _SPEC.match(self.space):
            raise ConfigurationError(f"Space '{self.space}' is neither a spec nor a file.")
        field_name = self.field.split("(")[0].strip()
        if not os.path.isfile(self.field) and field_name not in FIELD_NAMES:
            raise ConfigurationError(f"Field '{self.field}' is neither a known field nor a file.")
        for name in ("q", "p"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 1:
                raise ConfigurationError(f"{name} must be a real greater than 1, not '{value}'.")
        for name in ("tau", "lambda_"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
                raise ConfigurationError(f"{name} must be a positive real, not '{value}'.")
        if self.lambda_ < 1:
            raise ConfigurationError(f"lambda_ must be at least 1, not '{self.lambda_}'.")
        if self.radius is not None and not self.radius > 0:
            raise ConfigurationError(f"radius must be a positive real, not '{self.radius}'.")
        for name in ("seed", "steps", "pairs"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigurationError(f"{name} must be of type int, not '{type(value)}'.")
        if self.seed < 0 or self.steps < 1 or self.pairs < 1:
            raise ConfigurationError("seed must be >= 0; steps and pairs must be >= 1.")
        object.__setattr__(self, "deltas", _positive_list("deltas", self.deltas))
        object.__setattr__(self, "times", _positive_list("times", self.times))
        if not is_strictly_increasing(self.times):
            raise ConfigurationError(f"times must be strictly increasing, not {list(self.times)}.")
        output_format = self.output_format.lower()
        if output_format not in OUTPUT_FORMATS:
            raise ConfigurationError(
                f"output_format must be one of {list(OUTPUT_FORMATS)}, not '{self.output_format}'."
            )
        object.__setattr__(self, "output_format", output_format)
        for name in ("curves", "balls"):
            path = getattr(self, name)
            if path is not None and not os.path.isfile(path):
                raise ConfigurationError(f"{name} file '{path}' does not exist.")

    @classmethod
    def from_dict(cls, values: Mapping[str, Any]) -> "ExperimentConfig":
        """Build a config from a manifest entry (CLI flag names accepted)."""

        aliases = {"format": "output_format", "lambda": "lambda_"}
        known = {f.name for f in dataclasses.fields(cls)}
        options = {}
        for key, value in values.items():
            key = aliases.get(key, key.replace("-", "_"))
            if key not in known:
                raise ConfigurationError(f"Unknown configuration key '{key}'.")
            options[key] = value
        try:
            return cls(**options)
        except TypeError as missing:
            raise ConfigurationError(f"Incomplete configuration: {missing}") from missing
