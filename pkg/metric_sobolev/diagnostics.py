"""
Maximal functions, Lebesgue points, doubling constants and Poincare
inequality checks.

All means are mass-weighted and all balls are open.
"""

import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd

from ._typing import FloatArray, IndexArray, PointPair, BallGrid
from .exceptions import InvalidParameterError
from .report import Report
from .space import FiniteMetricMeasureSpace, ScalarField, ball_members, field_values
from .utils.validating import validate_positive

ZERO_OSCILLATION = 1e-14


def _validate_q(q: float) -> float:
    if isinstance(q, bool) or not isinstance(q, (int, float)):
        raise TypeError(f"q must be of type float, not '{type(q)}'.")
    if not math.isfinite(q) or q < 1:
        raise InvalidParameterError(f"q must be at least 1, not '{q}'.")
    return float(q)


def _largest_ball_mean(
    space: FiniteMetricMeasureSpace, weights: FloatArray, x: int, eps: float
) -> float:
    """sup over 0 < r <= eps of the mean of weights over B(x, r), or nan."""

    row = space.distance_row(x)
    order = np.argsort(row, kind="stable")
    distances = row[order]
    mass = np.cumsum(space.mass[order])
    total = np.cumsum((space.mass * weights)[order])
    # One ball per distinct distance d < eps: all points with d(x, y) <= d.
    last = np.flatnonzero(np.append(distances[1:] != distances[:-1], True))
    last = last[(distances[last] < eps) & (mass[last] > 0)]
    if last.size == 0:
        return math.nan
    return float(np.max(total[last] / mass[last]))


def maximal_function(space: FiniteMetricMeasureSpace, f, q: float, eps: float) -> ScalarField:
    """eps-maximal function (sup_{0 < r <= eps} mean_{B(x, r)} |f|^q)^(1/q).

    Points none of whose balls up to radius eps carry mass get 0 and a
    warning.
    """

    q = _validate_q(q)
    eps = validate_positive("eps", eps)
    weights = np.abs(field_values(space, f)) ** q
    best = np.array([_largest_ball_mean(space, weights, x, eps) for x in range(space.n)])
    massless = np.isnan(best)
    if massless.any():
        warnings.warn(
            f"{int(massless.sum())} points have no ball of positive mass within "
            f"radius {eps}; their maximal function is set to 0.",
            stacklevel=2,
        )
        best[massless] = 0.0
    return ScalarField(values=best ** (1.0 / q), space_id=space.space_id)


def _ball_mean(space, values, members) -> float:
    mass = space.mass[members]
    total = mass.sum()
    if total <= 0:
        return math.nan
    return float(mass @ values[members] / total)


def lebesgue_profile(
    space: FiniteMetricMeasureSpace, f, q: float, x, radii: Sequence[float]
) -> list[float]:
    """Mean of |f - f(x)|^q over B(x, r), for every radius.

    Radii whose ball has no mass give nan and a warning.
    """

    q = _validate_q(q)
    x = space.index_of(x)
    values = field_values(space, f)
    oscillation = np.abs(values - values[x]) ** q
    profile = []
    for r in radii:
        r = validate_positive("radius", r)
        mean = _ball_mean(space, oscillation, ball_members(space, x, r))
        if math.isnan(mean):
            warnings.warn(f"Ball B({space.ids[x]}, {r}) has no mass.", stacklevel=2)
        profile.append(mean)
    return profile


@dataclass(frozen=True)
class LebesgueSet:
    """Set E with B(center, tau * radius) inside E inside B(x, radius)."""

    center: int
    tau: float
    radius: float
    members: tuple[int, ...]


def lebesgue_set_profile(
    space: FiniteMetricMeasureSpace,
    f,
    q: float,
    x,
    sets: Sequence[LebesgueSet],
    doubling: Optional["DoublingReport"] = None,
) -> Report:
    """Means of |f - f(x)|^q over sets comparable to balls around x.

    For every set E the containments ``B(y, tau r) <= E <= B(x, r)`` are
    verified, and the mean over E is compared with the ball mean times
    m(B(x, r)) / m(E). With doubling constants the a priori factor
    beta * tau^(-alpha) is reported too.
    """

    q = _validate_q(q)
    x = space.index_of(x)
    values = field_values(space, f)
    oscillation = np.abs(values - values[x]) ** q
    report = Report(name="lebesgue_set_profile")
    rows = []
    for item in sets:
        members = np.unique(np.asarray(item.members, dtype=np.intp))
        outer = ball_members(space, x, item.radius)
        inner = ball_members(space, item.center, item.tau * item.radius)
        contained = bool(np.isin(inner, members).all() and np.isin(members, outer).all())
        set_mean = _ball_mean(space, oscillation, members)
        ball_mean = _ball_mean(space, oscillation, outer)
        mass_ratio = space.mass[outer].sum() / space.mass[members].sum()
        factor = math.nan
        if doubling is not None:
            factor = doubling.beta * item.tau ** (-doubling.alpha)
        rows.append(
            {
                "radius": item.radius,
                "tau": item.tau,
                "contained": contained,
                "set_mean": set_mean,
                "ball_mean": ball_mean,
                "mass_ratio": mass_ratio,
                "doubling_factor": factor,
            }
        )
    table = pd.DataFrame(
        rows,
        columns=[
            "radius",
            "tau",
            "contained",
            "set_mean",
            "ball_mean",
            "mass_ratio",
            "doubling_factor",
        ],
    )
    report.tables["sets"] = table
    misplaced = int((~table["contained"].astype(bool)).sum())
    report.record("containment", misplaced == 0, worst=misplaced, bound=0)
    excess = table["set_mean"] - table["mass_ratio"] * table["ball_mean"]
    report.record(
        "set_mean_bound",
        bool((excess <= 1e-12 * (1 + table["ball_mean"].abs())).all()),
        worst=float(excess.max()) if len(table) else 0.0,
        bound=0.0,
        detail="mean over E <= m(B)/m(E) * mean over B",
    )
    return report


@dataclass
class DoublingReport(Report):
    """Measured doubling constants.

    Attributes
    ----------
    c_D_metric : int
        Largest greedy covering number of a sampled r-ball by r/2-balls
        (an upper bound on the covering number).
    c_D_measure : float
        Largest mass ratio m(B(x, 2r)) / m(B(x, r)).
    alpha, beta : float
        log2(c_D_measure) and c_D_measure ** 2.
    samples : list of (int, float)
        The balls used.
    """

    c_D_metric: int = 1
    c_D_measure: float = 1.0
    alpha: float = 0.0
    beta: float = 1.0
    samples: BallGrid = field(default_factory=list)


def radius_ladder(space: FiniteMetricMeasureSpace) -> list[float]:
    """diam/2, diam/4, ... down to the smallest positive distance."""

    if space.n < 2:
        return [1.0]
    radii = []
    r = space.diameter / 2
    while r >= space.min_positive_distance:
        radii.append(r)
        r /= 2
    return radii or [space.min_positive_distance]


def default_ball_grid(space: FiniteMetricMeasureSpace) -> BallGrid:
    """All support points times the radius ladder."""

    support = np.flatnonzero(space.support)
    if support.size == 0:
        raise InvalidParameterError("The space has no point of positive mass.")
    return [(int(x), r) for x in support for r in radius_ladder(space)]


def greedy_covering_number(
    space: FiniteMetricMeasureSpace, members: IndexArray, center: int, radius: float
) -> int:
    """Number of open radius-balls a farthest-point traversal needs to cover members."""

    gap = space.distance_row(center)[members].copy()
    count = 1
    while np.any(gap >= radius):
        farthest = members[int(np.argmax(gap))]
        gap = np.minimum(gap, space.distance_row(farthest)[members])
        count += 1
    return count


def doubling_constants(space: FiniteMetricMeasureSpace, ball_grid: BallGrid) -> DoublingReport:
    """Estimate metric and measure doubling constants on a ball grid.

    Raises
    ------
    InvalidParameterError
        Empty ball grid, or a sampled ball without mass.
    """

    if not ball_grid:
        raise InvalidParameterError("doubling_constants needs at least one ball.")
    rows = []
    for x, r in ball_grid:
        x = space.index_of(x)
        r = validate_positive("radius", r)
        members = ball_members(space, x, r)
        mass = space.mass[members].sum()
        if mass <= 0:
            raise InvalidParameterError(f"Ball B({space.ids[x]}, {r}) has no mass.")
        doubled = space.mass[ball_members(space, x, 2 * r)].sum()
        rows.append(
            {
                "point": space.ids[x],
                "radius": r,
                "covering": greedy_covering_number(space, members, x, r / 2),
                "mass_ratio": doubled / mass,
            }
        )
    table = pd.DataFrame(rows, columns=["point", "radius", "covering", "mass_ratio"])
    c_metric = int(table["covering"].max())
    c_measure = float(table["mass_ratio"].max())
    report = DoublingReport(
        name="doubling_constants",
        c_D_metric=c_metric,
        c_D_measure=c_measure,
        alpha=math.log2(c_measure),
        beta=c_measure**2,
        samples=[(space.index_of(x), float(r)) for x, r in ball_grid],
    )
    per_radius = table.groupby("radius", sort=True)[["covering", "mass_ratio"]].max()
    report.tables["balls"] = table
    report.tables["per_radius"] = per_radius.reset_index()
    report.values.update(
        {
            "c_D_metric": c_metric,
            "c_D_measure": c_measure,
            "alpha": report.alpha,
            "beta": report.beta,
            "alpha_metric": math.log2(c_metric),
            "beta_metric": c_metric**2,
            "balls": len(table),
        }
    )
    report.record("metric_constant", c_metric >= 1, worst=c_metric, bound=1)
    report.record(
        "measure_constant",
        c_measure >= 1 or int(space.support.sum()) < 2,
        worst=c_measure,
        bound=1.0,
    )
    return report


def mass_scaling_slope(
    space: FiniteMetricMeasureSpace,
    radii: Optional[Sequence[float]] = None,
    points: Optional[Sequence[int]] = None,
) -> float:
    """Log-log slope of the mean ball mass against the radius.

    The least-squares fit uses the middle half of the sorted radius
    ladder. For an Ahlfors-regular sample the slope approximates the
    dimension.
    """

    radii = sorted(radius_ladder(space) if radii is None else radii, reverse=True)
    points = np.flatnonzero(space.support) if points is None else np.asarray(points)
    middle = radii[len(radii) // 4 : len(radii) - len(radii) // 4]
    if len(middle) < 2:
        middle = radii
    if len(middle) < 2:
        raise InvalidParameterError("Slope fitting needs at least two radii.")
    mean_mass = [
        np.mean([space.mass[ball_members(space, x, r)].sum() for x in points]) for r in middle
    ]
    slope, _ = np.polyfit(np.log(middle), np.log(mean_mass), 1)
    return float(slope)


@dataclass
class PoincareReport(Report):
    """Per-ball Poincare constants.

    Attributes
    ----------
    tau_required : list of float
        Smallest tau making the inequality hold, per ball (inf when the
        gradient mean vanishes on a non-constant ball).
    tau_global : float
    lambda_ : float
        Dilation of the gradient ball.
    """

    tau_required: list[float] = field(default_factory=list)
    tau_global: float = 0.0
    lambda_: float = 1.0


def poincare_check(
    space: FiniteMetricMeasureSpace,
    u,
    g,
    q: float,
    lambda_: float,
    ball_grid: BallGrid,
) -> PoincareReport:
    """tau_required = mean_B |u - u_B| / (r (mean_{Lambda B} g^q)^(1/q)) per ball.

    0/0 counts as 0; a positive oscillation over a null gradient is
    recorded as inf and flagged.
    """

    q = _validate_q(q)
    if lambda_ < 1:
        raise InvalidParameterError(f"lambda must be at least 1, not '{lambda_}'.")
    u_values = field_values(space, u)
    g_values = field_values(space, g)
    if np.any(g_values < 0):
        raise InvalidParameterError("The gradient surrogate g must be nonnegative.")
    threshold = ZERO_OSCILLATION * (1 + np.abs(u_values).max())

    rows = []
    for x, r in ball_grid:
        x = space.index_of(x)
        r = validate_positive("radius", r)
        members = ball_members(space, x, r)
        mean_u = _ball_mean(space, u_values, members)
        oscillation = _ball_mean(space, np.abs(u_values - mean_u), members)
        if oscillation <= threshold:
            oscillation = 0.0
        g_mean = _ball_mean(space, g_values**q, ball_members(space, x, lambda_ * r)) ** (1 / q)
        if oscillation == 0:
            tau = 0.0
        elif g_mean == 0:
            tau = math.inf
        else:
            tau = oscillation / (r * g_mean)
        rows.append(
            {
                "point": space.ids[x],
                "radius": r,
                "oscillation": oscillation,
                "gradient_mean": g_mean,
                "tau": tau,
            }
        )
    table = pd.DataFrame(rows, columns=["point", "radius", "oscillation", "gradient_mean", "tau"])
    taus = table["tau"].tolist()
    finite_positive = [tau for tau in taus if 0 < tau < math.inf]
    report = PoincareReport(
        name="poincare_check",
        tau_required=taus,
        tau_global=max(taus) if taus else 0.0,
        lambda_=lambda_,
    )
    report.tables["balls"] = table
    infinite = int(np.isinf(table["tau"]).sum())
    report.values.update(
        {
            "q": q,
            "lambda": lambda_,
            "tau_global": report.tau_global,
            "infinite_balls": infinite,
            "stability": (
                max(finite_positive) / min(finite_positive) if finite_positive else 1.0
            ),
        }
    )
    report.record(
        "finite_tau",
        infinite == 0,
        worst=infinite,
        bound=0,
        detail="balls where u oscillates but g vanishes",
    )
    return report


def _maximal_at(space, weights, x, eps, q) -> float:
    best = _largest_ball_mean(space, weights, x, eps)
    return 0.0 if math.isnan(best) else best ** (1.0 / q)


def telescoping_check(
    space: FiniteMetricMeasureSpace,
    u,
    g,
    q: float,
    lambda_: float,
    pairs: Sequence[PointPair],
    alpha: Optional[float] = None,
    beta: Optional[float] = None,
    tau: Optional[float] = None,
) -> Report:
    """Compare |u(x) - u(y)| / (d (M g(x) + M g(y))) with C = 2 * 2^(1+alpha) beta tau.

    M is the q-maximal function at scale 2 * lambda * d(x, y). Missing
    constants are measured on the default ball grid.

    Raises
    ------
    InvalidParameterError
        A pair of points at distance zero.
    """

    q = _validate_q(q)
    if alpha is None or beta is None:
        doubling = doubling_constants(space, default_ball_grid(space))
        alpha, beta = doubling.alpha, doubling.beta
    if tau is None:
        tau = poincare_check(space, u, g, q, lambda_, default_ball_grid(space)).tau_global
    constant = 2 * 2 ** (1 + alpha) * beta * tau

    u_values = field_values(space, u)
    weights = np.abs(field_values(space, g)) ** q
    rows = []
    for x, y in pairs:
        x, y = space.index_of(x), space.index_of(y)
        d = space.distance(x, y)
        if d <= 0:
            raise InvalidParameterError(
                f"Pair ({space.ids[x]}, {space.ids[y]}) is at distance zero."
            )
        eps = 2 * lambda_ * d
        maximal = _maximal_at(space, weights, x, eps, q) + _maximal_at(space, weights, y, eps, q)
        jump = abs(u_values[x] - u_values[y])
        if jump == 0:
            ratio = 0.0
        elif maximal == 0:
            ratio = math.inf
        else:
            ratio = jump / (d * maximal)
        rows.append({"x": space.ids[x], "y": space.ids[y], "distance": d, "ratio": ratio})

    table = pd.DataFrame(rows, columns=["x", "y", "distance", "ratio"])
    worst = float(table["ratio"].max()) if len(table) else 0.0
    report = Report(name="telescoping_check")
    report.tables["pairs"] = table
    report.values.update(
        {"alpha": alpha, "beta": beta, "tau": tau, "constant": constant, "max_ratio": worst}
    )
    report.record(
        "telescoping",
        worst <= constant,
        worst=worst,
        bound=constant,
        detail="|u(x) - u(y)| / (d (M g(x) + M g(y))) against 2 * 2^(1+alpha) beta tau",
    )
    return report
