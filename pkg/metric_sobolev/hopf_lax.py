"""
Hopf-Lax semigroup on finite spaces and checks of its laws.

    Q_t f(x) = min_y f(y) + d(x, y)^p / (p t^(p-1))

The minimum is attained on a finite space, so D-(x, t) and D+(x, t) are
the smallest and largest distance from x to the set of minimizers.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ._typing import FloatArray, IndexArray
from .exceptions import InvalidParameterError
from .report import Report
from .slopes import asymptotic_lip_estimate, ball_lipschitz, lipschitz_constant
from .space import FiniteMetricMeasureSpace, ScalarField, field_values
from .utils.validating import (
    is_strictly_increasing,
    validate_count,
    validate_exponent,
    validate_positive,
)

TIE_TOLERANCE = 1e-12
EXCEPTIONAL_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class HopfLaxResult:
    """Q_t f together with its minimizer diagnostics.

    Attributes
    ----------
    t, p, q : float
        Time, exponent and dual exponent p / (p - 1).
    field : ScalarField
        Q_t f.
    dplus, dminus : array of float
        Largest and smallest distance to the minimizer set, per point.
    argmin_sets : tuple of arrays of int
        Minimizers within ``TIE_TOLERANCE`` of the minimum, per point.
    """

    t: float
    p: float
    q: float
    field: ScalarField
    dplus: FloatArray
    dminus: FloatArray
    argmin_sets: tuple[IndexArray, ...] = field(repr=False)

    @property
    def values(self) -> FloatArray:
        return self.field.values


def hopf_lax(
    space: FiniteMetricMeasureSpace, f, p: float, t: float = 0.0, at_zero: bool = False
) -> HopfLaxResult:
    """Evaluate Q_t f by exact enumeration.

    Parameters
    ----------
    space : FiniteMetricMeasureSpace
    f : ScalarField or array
    p : float
        Exponent > 1.
    t : float
        Positive time.
    at_zero : bool, optional (default=False)
        Return the t = 0 convention Q_0 f = f, D+ = D- = 0 instead.

    Raises
    ------
    InvalidParameterError
        p <= 1, or t <= 0 without ``at_zero``.

    Examples
    --------
    >>> from metric_sobolev.generators import graph
    >>> space = graph([("a", "b", 1.0)])
    >>> hopf_lax(space, [0.0, 1.0], p=2, t=1).values.tolist()
    [0.0, 0.5]
    """

    p = validate_exponent("p", p)
    q = p / (p - 1)
    values = field_values(space, f)
    if at_zero:
        zeros = np.zeros(space.n)
        return HopfLaxResult(
            t=0.0,
            p=p,
            q=q,
            field=ScalarField(values=values, space_id=space.space_id),
            dplus=zeros,
            dminus=zeros.copy(),
            argmin_sets=tuple(np.array([x]) for x in range(space.n)),
        )
    t = validate_positive("t", t)

    scale = p * t ** (p - 1)
    minimum = np.empty(space.n)
    dplus = np.empty(space.n)
    dminus = np.empty(space.n)
    argmin_sets = []
    for x in range(space.n):
        row = space.distance_row(x)
        objective = values + row**p / scale
        minimum[x] = objective.min()
        minimizers = np.flatnonzero(objective <= minimum[x] + TIE_TOLERANCE)
        argmin_sets.append(minimizers)
        dplus[x] = row[minimizers].max()
        dminus[x] = row[minimizers].min()
    return HopfLaxResult(
        t=t,
        p=p,
        q=q,
        field=ScalarField(values=minimum, space_id=space.space_id),
        dplus=dplus,
        dminus=dminus,
        argmin_sets=tuple(argmin_sets),
    )


@dataclass
class HJReport(Report):
    """Residuals of the Hopf-Lax checks.

    Attributes
    ----------
    skipped : int
        Points skipped as exceptional (D+ != D-).
    ratios : list of float
        Global Lipschitz ratios Lip(Q_t f) / Lip(f), per time.
    """

    skipped: int = 0
    ratios: list[float] = field(default_factory=list)


def _validate_times(times: Sequence[float]) -> list[float]:
    times = [validate_positive("t", float(t)) for t in times]
    if not times:
        raise InvalidParameterError("At least one time is required.")
    if not is_strictly_increasing(times):
        raise InvalidParameterError(f"times must be strictly increasing, not {times}.")
    return times


def check_monotonicity(
    space: FiniteMetricMeasureSpace, f, p: float, times: Sequence[float], tol: float = 1e-12
) -> HJReport:
    """Check D+(x, t) <= D-(x, s) and Q_s f <= Q_t f for consecutive t < s."""

    times = _validate_times(times)
    results = [hopf_lax(space, f, p, t) for t in times]
    report = HJReport(name="check_monotonicity")
    rows = []
    for earlier, later in zip(results[:-1], results[1:]):
        violation = np.maximum(0.0, earlier.dplus - later.dminus)
        increase = np.maximum(0.0, later.values - earlier.values)
        rows.append(
            {
                "t": earlier.t,
                "s": later.t,
                "max_violation": float(violation.max()),
                "max_value_increase": float(increase.max()),
            }
        )
    table = pd.DataFrame(rows, columns=["t", "s", "max_violation", "max_value_increase"])
    report.tables["monotonicity"] = table
    worst = float(table["max_violation"].max()) if len(table) else 0.0
    worst_increase = float(table["max_value_increase"].max()) if len(table) else 0.0
    report.record(
        "dplus_below_later_dminus",
        worst <= tol,
        worst=worst,
        bound=tol,
        detail="max over x and consecutive t < s of D+(x, t) - D-(x, s)",
    )
    report.record(
        "value_nonincreasing",
        worst_increase <= tol,
        worst=worst_increase,
        bound=tol,
        detail="t -> Q_t f(x) is nonincreasing",
    )
    report.values.update({"p": p, "times": times})
    return report


def _central_difference(space, f, p, t, h) -> FloatArray:
    later = hopf_lax(space, f, p, t + h).values
    earlier = hopf_lax(space, f, p, t - h).values
    return (later - earlier) / (2 * h)


def _validate_step(t: float, h: float) -> tuple[float, float]:
    t = validate_positive("t", t)
    h = validate_positive("h", h)
    if not h < t:
        raise InvalidParameterError(f"Step h must be smaller than t, not h={h}, t={t}.")
    return t, h


def check_time_derivative(
    space: FiniteMetricMeasureSpace,
    f,
    p: float,
    t: float,
    h: float,
    tol: float = 1e-5,
    fraction: float = 0.95,
) -> HJReport:
    """Compare dQ_t f / dt with -(1/q) (D(x, t) / t)^p.

    The derivative is taken by central differences with step h. Points
    where D+ and D- differ by more than ``EXCEPTIONAL_TOLERANCE`` are
    skipped and counted. The check passes when at least ``fraction`` of
    the remaining points have a residual within ``tol``.
    """

    t, h = _validate_step(t, h)
    result = hopf_lax(space, f, p, t)
    derivative = _central_difference(space, f, p, t, h)
    exceptional = result.dplus - result.dminus > EXCEPTIONAL_TOLERANCE
    law = -((result.dplus / t) ** result.p) / result.q
    residual = np.abs(derivative - law)
    residual[exceptional] = np.nan

    report = HJReport(name="check_time_derivative", skipped=int(exceptional.sum()))
    regular = residual[~exceptional]
    within = float(np.mean(regular <= tol)) if regular.size else 1.0
    report.tables["time_derivative"] = pd.DataFrame(
        {
            "point": list(space.ids),
            "derivative": derivative,
            "law": law,
            "residual": residual,
            "exceptional": exceptional,
        }
    )
    report.values.update(
        {
            "p": p,
            "t": t,
            "h": h,
            "skipped": report.skipped,
            "fraction_within_tol": within,
            "max_residual": float(regular.max()) if regular.size else 0.0,
        }
    )
    report.record(
        "time_derivative",
        within >= fraction,
        worst=within,
        bound=fraction,
        detail=f"share of regular points with residual <= {tol}",
    )
    return report


def check_semicontinuity(
    space: FiniteMetricMeasureSpace,
    f,
    p: float,
    t: float,
    h: float,
    levels: int = 4,
    tol: float = 1e-12,
) -> HJReport:
    """Check that D+ is upper and D- lower semicontinuous in t at time t.

    D+ and D- are evaluated at t -+ h / 2^k for k = 0, ..., levels - 1.
    Close enough to t the minimizer sets are subsets of the one at t, so at
    the closest times D+(x, .) may only drop and D-(x, .) may only rise.

    Examples
    --------
    >>> from metric_sobolev.generators import graph
    >>> space = graph([("a", "b", 1.0)])
    >>> check_semicontinuity(space, [0.0, 0.5], p=2, t=1.0, h=0.5).passed
    True
    """

    t, h = _validate_step(t, h)
    levels = validate_count("levels", levels, minimum=1)
    center = hopf_lax(space, f, p, t)
    rows = []
    for level in range(levels):
        offset = h / 2**level
        for side, near_t in (("left", t - offset), ("right", t + offset)):
            near = hopf_lax(space, f, p, near_t)
            rows.append(
                {
                    "level": level,
                    "side": side,
                    "t": near_t,
                    "dplus_excess": float((near.dplus - center.dplus).max()),
                    "dminus_deficit": float((center.dminus - near.dminus).max()),
                }
            )
    table = pd.DataFrame(rows, columns=["level", "side", "t", "dplus_excess", "dminus_deficit"])
    closest = table[table["level"] == levels - 1]
    dplus_excess = float(closest["dplus_excess"].max())
    dminus_deficit = float(closest["dminus_deficit"].max())

    report = HJReport(name="check_semicontinuity")
    report.tables["semicontinuity"] = table
    report.values.update({"p": center.p, "t": t, "h": h, "levels": levels})
    report.record(
        "dplus_upper_semicontinuous",
        dplus_excess <= tol,
        worst=dplus_excess,
        bound=tol,
        detail="max over x of D+(x, s) - D+(x, t) at the closest times s",
    )
    report.record(
        "dminus_lower_semicontinuous",
        dminus_deficit <= tol,
        worst=dminus_deficit,
        bound=tol,
        detail="max over x of D-(x, t) - D-(x, s) at the closest times s",
    )
    return report


def check_subsolution(
    space: FiniteMetricMeasureSpace,
    f,
    p: float,
    t: float,
    h: float,
    r: float,
    tol: float = 1e-2,
    fraction: float = 0.9,
) -> HJReport:
    """Residual max(0, dQ_t f / dt + (1/q) Lip(Q_t f, B(x, r))^q) per point.

    Lip_a is replaced by its value at the finite radius r, which
    overestimates it; residuals shrink as r decreases.
    """

    t, h = _validate_step(t, h)
    r = validate_positive("r", r)
    p = validate_exponent("p", p)
    q = p / (p - 1)
    result = hopf_lax(space, f, p, t)
    derivative = _central_difference(space, f, p, t, h)
    lip = asymptotic_lip_estimate(space, result.field, r).values
    residual = np.maximum(0.0, derivative + lip**q / q)
    within = float(np.mean(residual <= tol))

    report = HJReport(name="check_subsolution")
    report.tables["subsolution"] = pd.DataFrame(
        {"point": list(space.ids), "derivative": derivative, "lip": lip, "residual": residual}
    )
    report.values.update(
        {
            "p": p,
            "t": t,
            "h": h,
            "r": r,
            "fraction_within_tol": within,
            "max_residual": float(residual.max()),
        }
    )
    report.record(
        "subsolution",
        within >= fraction,
        worst=within,
        bound=fraction,
        detail=f"share of points with residual <= {tol} at radius {r}",
    )
    return report


def lipschitz_bound_check(
    space: FiniteMetricMeasureSpace, f, p: float, times: Sequence[float], tol: float = 1e-12
) -> HJReport:
    """Check Lip(Q_t f) <= p Lip(f) and D+(x, t) <= t (p Lip(f))^(1/(p-1))."""

    times = [validate_positive("t", float(t)) for t in times]
    p = validate_exponent("p", p)
    lip_f = lipschitz_constant(space, f)
    report = HJReport(name="lipschitz_bound_check")
    rows = []
    for t in times:
        result = hopf_lax(space, f, p, t)
        lip_q = lipschitz_constant(space, result.field)
        ratio = lip_q / lip_f if lip_f > 0 else 0.0
        dplus_bound = t * (p * lip_f) ** (1.0 / (p - 1))
        rows.append(
            {
                "t": t,
                "lip_Q": lip_q,
                "ratio": ratio,
                "max_dplus": float(result.dplus.max()),
                "dplus_bound": dplus_bound,
            }
        )
        report.ratios.append(ratio)
    table = pd.DataFrame(rows, columns=["t", "lip_Q", "ratio", "max_dplus", "dplus_bound"])
    report.tables["lipschitz"] = table
    worst_ratio = max(report.ratios) if report.ratios else 0.0
    dplus_excess = (
        float((table["max_dplus"] - table["dplus_bound"]).max()) if len(table) else 0.0
    )
    report.values.update({"p": p, "lip_f": lip_f})
    report.record(
        "lipschitz_ratio",
        worst_ratio <= p + tol,
        worst=worst_ratio,
        bound=p + tol,
        detail="Lip(Q_t f) / Lip(f)",
    )
    report.record(
        "dplus_bound",
        dplus_excess <= tol * max(1.0, float(table["dplus_bound"].max()) if len(table) else 1.0),
        worst=dplus_excess,
        bound=0.0,
        detail="max D+(x, t) - t (p Lip f)^(1/(p-1))",
    )
    return report


def check_slope_bound(
    space: FiniteMetricMeasureSpace, f, p: float, t: float, r: float, tol: float = 1e-12
) -> HJReport:
    """Check Lip(Q_t f, B(x, r)) <= t^(1-p) (2r + sup_{B(x, r)} D+)^(p-1) per point."""

    r = validate_positive("r", r)
    result = hopf_lax(space, f, p, t)
    lip = np.empty(space.n)
    bound = np.empty(space.n)
    for x in range(space.n):
        members = np.flatnonzero(space.distance_row(x) < r)
        lip[x] = ball_lipschitz(space, result.values, x, r)
        bound[x] = t ** (1 - result.p) * (2 * r + result.dplus[members].max()) ** (result.p - 1)
    excess = lip - bound
    report = HJReport(name="check_slope_bound")
    report.tables["slope_bound"] = pd.DataFrame(
        {"point": list(space.ids), "lip": lip, "bound": bound}
    )
    worst = float(excess.max())
    report.values.update({"p": result.p, "t": t, "r": r})
    report.record(
        "slope_bound",
        bool(np.all(excess <= tol * np.maximum(bound, 1.0))),
        worst=worst,
        bound=0.0,
        detail="Lip(Q_t f, B(x, r)) - t^(1-p) (2r + sup D+)^(p-1)",
    )
    return report
