"""
Structured records of diagnostic runs.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Optional

import pandas as pd

from ._typing import JSONDict


@dataclass
class Check:
    """Outcome of one hard assertion.

    Parameters
    ----------
    name : str
    passed : bool
    worst : float
        Worst-case value observed (largest violation, smallest slack or
        largest ratio depending on the check).
    bound : float, optional
        Threshold the worst value was compared against.
    detail : str
    """

    name: str
    passed: bool
    worst: float = float("nan")
    bound: Optional[float] = None
    detail: str = ""

    def to_dict(self) -> JSONDict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "worst": float(self.worst),
            "bound": None if self.bound is None else float(self.bound),
            "detail": self.detail,
        }


@dataclass
class Report:
    """Serializable record of a diagnostic run.

    Parameters
    ----------
    name : str
        Operation or experiment that produced the report.

    Attributes
    ----------
    checks : dict of str to Check
        Hard assertions in insertion order.
    values : dict
        Constants, worst-case ratios and other scalars.
    tables : dict of str to pandas.DataFrame
        Plot-ready per-item data.
    warnings : list of str
    """

    name: str
    checks: dict[str, Check] = field(default_factory=dict)
    values: dict[str, Any] = field(default_factory=dict)
    tables: dict[str, pd.DataFrame] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks.values())

    def record(
        self,
        name: str,
        passed: bool,
        worst: float = float("nan"),
        bound: Optional[float] = None,
        detail: str = "",
    ) -> Check:
        """Add (or replace) a check and return it."""

        check = Check(
            name=name, passed=bool(passed), worst=float(worst), bound=bound, detail=detail
        )
        self.checks[name] = check
        return check

    def warn(self, message: str) -> None:
        """Record a warning and emit it through the warnings module."""

        self.warnings.append(message)
        warnings.warn(message, stacklevel=3)

    def failures(self) -> list[Check]:
        return [check for check in self.checks.values() if not check.passed]

    def merge(
        self, other: "Report", prefix: Optional[str] = None, include_checks: bool = True
    ) -> None:
        """Fold another report's content into this one.

        With ``include_checks=False`` the other report's checks are kept as
        informational values (``<prefix>.<check>.passed``) only.
        """

        prefix = f"{prefix or other.name}."
        for check in other.checks.values():
            if not include_checks:
                self.values[f"{prefix}{check.name}.passed"] = check.passed
                self.values[f"{prefix}{check.name}.worst"] = check.worst
                continue
            self.checks[prefix + check.name] = Check(
                name=prefix + check.name,
                passed=check.passed,
                worst=check.worst,
                bound=check.bound,
                detail=check.detail,
            )
        for key, value in other.values.items():
            self.values[prefix + key] = value
        for key, table in other.tables.items():
            self.tables[prefix + key] = table
        self.warnings.extend(other.warnings)

    def to_frame(self) -> pd.DataFrame:
        """Main table of the report; the check summary by default."""

        return pd.DataFrame(
            [check.to_dict() for check in self.checks.values()],
            columns=["name", "passed", "worst", "bound", "detail"],
        )

    def to_dict(self) -> JSONDict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": {key: check.to_dict() for key, check in self.checks.items()},
            "values": dict(self.values),
            "tables": dict(self.tables),
            "warnings": list(self.warnings),
        }


def worst_or_zero(values: Any, reducer=max) -> float:
    """Reduce an iterable of floats, returning 0.0 when it is empty."""

    values = [float(value) for value in values if not math.isnan(float(value))]
    return float(reducer(values)) if values else 0.0
