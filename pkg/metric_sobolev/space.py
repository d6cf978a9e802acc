"""
Core data types for finite metric measure spaces.

A space is a finite point list with a symmetric distance table (or, above
``TABLE_LIMIT`` points, a cached metric callback) and a nonnegative mass
per point. Spaces, fields and balls are immutable once built.
"""

from __future__ import annotations

import functools
import hashlib
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
import pandas as pd
from scipy.spatial.distance import cdist

from ._typing import BoolArray, Edge, FloatArray, IndexArray, PointIndex
from .exceptions import InvalidParameterError, MismatchError
from .report import Report

TABLE_LIMIT = 4096
EXHAUSTIVE_TRIPLE_LIMIT = 2000
TRIANGLE_SAMPLE_SIZE = 200_000
TRIANGLE_RTOL = 1e-12


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.flags.writeable = False
    return array


class MetricOracle:
    """Metric given by a row callback, with on-demand caching.

    Parameters
    ----------
    n : int
        Number of points.
    distance_row : callable
        ``distance_row(i)`` returns the distances from point i to all
        points as a float array of length n.
    cache_size : int, optional (default=1024)
        Number of rows kept in the LRU cache.
    """

    def __init__(
        self, n: int, distance_row: Callable[[int], FloatArray], cache_size: int = 1024
    ) -> None:
        self.n = n
        self._distance_row = distance_row
        self._cached_row = functools.lru_cache(maxsize=cache_size)(self._compute_row)

    def _compute_row(self, index: int) -> FloatArray:
        row = np.asarray(self._distance_row(index), dtype=float)
        if row.shape != (self.n,):
            raise ValueError(
                f"distance_row must return {self.n} distances, not shape {row.shape}."
            )
        return _readonly(row)

    def row(self, index: int) -> FloatArray:
        return self._cached_row(int(index))


@dataclass(frozen=True, eq=False)
class FiniteMetricMeasureSpace:
    """Finite metric measure space (X, d, m).

    Parameters
    ----------
    ids : tuple of str
        Point identifiers, in input order.
    mass : array of float
        Nonnegative mass of the atom at each point.
    table : array of float, optional
        Full symmetric distance table; required unless ``oracle`` is given.
    oracle : MetricOracle, optional
        Metric callback for spaces above ``TABLE_LIMIT`` points.
    coords : array of float, optional
        Planar coordinates, shape (n, 2).
    metric : {'euclidean', 'graph', 'table'}
        How distances were obtained; drives serialization.
    edges : tuple of (str, str, float)
        Edge list for graph spaces.
    name : str
        Generator spec or file the space came from.

    Attributes
    ----------
    space_id : str
        Content hash of points, masses and distances.
    """

    ids: tuple[str, ...]
    mass: FloatArray
    table: Optional[FloatArray] = None
    oracle: Optional[MetricOracle] = None
    coords: Optional[FloatArray] = None
    metric: str = "table"
    edges: tuple[Edge, ...] = ()
    name: str = ""
    space_id: str = field(init=False)

    def __post_init__(self) -> None:
        if self.table is None and self.oracle is None:
            raise ValueError("Either a distance table or a metric oracle is required.")
        ids = tuple(str(point_id) for point_id in self.ids)
        if len(set(ids)) != len(ids):
            raise InvalidParameterError("Point identifiers must be unique.")
        mass = np.asarray(self.mass, dtype=float)
        if mass.shape != (len(ids),):
            raise InvalidParameterError(
                f"mass must hold one value per point ({len(ids)}), not shape {mass.shape}."
            )
        if not np.all(np.isfinite(mass)) or np.any(mass < 0):
            raise InvalidParameterError("Masses must be finite and nonnegative.")

        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "mass", _readonly(mass))
        if self.table is not None:
            table = np.asarray(self.table, dtype=float)
            if table.shape != (len(ids), len(ids)):
                raise InvalidParameterError(
                    f"Distance table must be {len(ids)}x{len(ids)}, not {table.shape}."
                )
            object.__setattr__(self, "table", _readonly(table))
        if self.coords is not None:
            object.__setattr__(
                self, "coords", _readonly(np.asarray(self.coords, dtype=float))
            )

        digest = hashlib.sha1()
        digest.update("\x1f".join(ids).encode())
        digest.update(self.mass.tobytes())
        if self.table is not None:
            digest.update(self.table.tobytes())
        else:
            digest.update(self.name.encode())
        object.__setattr__(self, "space_id", digest.hexdigest()[:16])

    @classmethod
    def from_table(
        cls,
        ids: Sequence[str],
        table: np.ndarray,
        mass: np.ndarray,
        coords: Optional[np.ndarray] = None,
        metric: str = "table",
        edges: Sequence[Edge] = (),
        name: str = "",
    ) -> "FiniteMetricMeasureSpace":
        return cls(
            ids=tuple(ids),
            mass=mass,
            table=table,
            coords=coords,
            metric=metric,
            edges=tuple(edges),
            name=name,
        )

    @classmethod
    def from_coordinates(
        cls,
        coords: np.ndarray,
        mass: np.ndarray,
        ids: Optional[Sequence[str]] = None,
        name: str = "",
    ) -> "FiniteMetricMeasureSpace":
        """Euclidean space on planar points; oracle-backed above TABLE_LIMIT."""

        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        n = coords.shape[0]
        ids = tuple(ids) if ids is not None else tuple(str(i) for i in range(n))
        if n <= TABLE_LIMIT:
            return cls(
                ids=ids,
                mass=mass,
                table=cdist(coords, coords),
                coords=coords,
                metric="euclidean",
                name=name,
            )

        def distance_row(index: int) -> FloatArray:
            return cdist(coords[index : index + 1], coords)[0]

        return cls(
            ids=ids,
            mass=mass,
            oracle=MetricOracle(n, distance_row),
            coords=coords,
            metric="euclidean",
            name=name,
        )

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def total_mass(self) -> float:
        return float(self.mass.sum())

    @property
    def support(self) -> BoolArray:
        """Mask of points with positive mass."""
        return self.mass > 0

    def index_of(self, point: Union[PointIndex, str]) -> PointIndex:
        """Resolve a point index or identifier to an index."""

        if isinstance(point, (int, np.integer)) and not isinstance(point, bool):
            if 0 <= point < self.n:
                return int(point)
            raise InvalidParameterError(f"Unknown point index '{point}'.")
        try:
            return self.ids.index(str(point))
        except ValueError as unknown_point:
            raise InvalidParameterError(f"Unknown point '{point}'.") from unknown_point

    def distance_row(self, index: PointIndex) -> FloatArray:
        if self.table is not None:
            return self.table[index]
        return self.oracle.row(index)

    def distance_rows(self, indices: Union[Sequence[int], IndexArray]) -> FloatArray:
        indices = np.asarray(indices, dtype=np.intp)
        if self.table is not None:
            return self.table[indices]
        return np.vstack([self.oracle.row(i) for i in indices]) if len(indices) else np.empty(
            (0, self.n)
        )

    def distance(self, i: PointIndex, j: PointIndex) -> float:
        return float(self.distance_row(i)[j])

    @functools.cached_property
    def dist(self) -> FloatArray:
        """Full distance table (materialized from the oracle if needed)."""
        if self.table is not None:
            return self.table
        return _readonly(self.distance_rows(np.arange(self.n)))

    @functools.cached_property
    def diameter(self) -> float:
        if self.n < 2:
            return 0.0
        return float(max(self.distance_row(i).max() for i in range(self.n)))

    @functools.cached_property
    def min_positive_distance(self) -> float:
        """Smallest distance between distinct points (inf for one point)."""
        best = np.inf
        for i in range(self.n):
            row = self.distance_row(i)
            positive = row[row > 0]
            if positive.size:
                best = min(best, float(positive.min()))
        return best

    def scalar_field(self, values: np.ndarray) -> "ScalarField":
        return ScalarField(values=values, space_id=self.space_id)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """One finite real value per point of a space.

    Supports pointwise ``+``, ``-`` and scaling by reals, so that
    combinations like ``(u + v) * 0.5`` stay attached to their space.
    """

    values: FloatArray
    space_id: str

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise InvalidParameterError("Field values must be one-dimensional.")
        if not np.all(np.isfinite(values)):
            raise InvalidParameterError("Field values must all be finite.")
        object.__setattr__(self, "values", _readonly(values))

    def __len__(self) -> int:
        return self.values.size

    def _combine(self, other, operation) -> "ScalarField":
        if isinstance(other, ScalarField):
            if other.space_id != self.space_id:
                raise MismatchError("Cannot combine fields living on different spaces.")
            other = other.values
        return ScalarField(values=operation(self.values, other), space_id=self.space_id)

    def __add__(self, other) -> "ScalarField":
        return self._combine(other, np.add)

    __radd__ = __add__

    def __sub__(self, other) -> "ScalarField":
        return self._combine(other, np.subtract)

    def __mul__(self, scalar: float) -> "ScalarField":
        return ScalarField(values=self.values * float(scalar), space_id=self.space_id)

    __rmul__ = __mul__

    def __neg__(self) -> "ScalarField":
        return self * -1.0


def field_values(space: FiniteMetricMeasureSpace, f) -> FloatArray:
    """Return the value array of a field, checking it belongs to space."""

    if isinstance(f, ScalarField):
        if f.space_id != space.space_id:
            raise MismatchError(
                f"Field belongs to space '{f.space_id}', not '{space.space_id}'."
            )
        values = f.values
    else:
        values = np.asarray(f, dtype=float)
        if values.ndim != 1 or not np.all(np.isfinite(values)):
            raise InvalidParameterError("Field values must be a finite 1-D array.")
    if values.size != space.n:
        raise MismatchError(
            f"Field has {values.size} values but the space has {space.n} points."
        )
    return values


@dataclass(frozen=True, eq=False)
class Ball:
    """Open ball B(center, radius) = {y : d(center, y) < radius}."""

    center: PointIndex
    radius: float
    members: IndexArray
    mass: float

    def __contains__(self, point: int) -> bool:
        return bool(np.any(self.members == point))


def ball_members(space: FiniteMetricMeasureSpace, center: PointIndex, radius: float) -> IndexArray:
    """Indices of points strictly closer than radius to center."""

    return np.flatnonzero(space.distance_row(center) < radius)


def ball_query(
    space: FiniteMetricMeasureSpace, center: Union[PointIndex, str], radius: float
) -> Ball:
    """Open ball around a point, with its mass.

    Parameters
    ----------
    space : FiniteMetricMeasureSpace
    center : int or str
        Point index or identifier.
    radius : float
        Positive radius.

    Returns
    -------
    ball : Ball

    Raises
    ------
    InvalidParameterError
        Unknown center or non-positive radius.
    """

    center = space.index_of(center)
    if not radius > 0:
        raise InvalidParameterError(f"radius must be a positive real, not '{radius}'.")
    members = ball_members(space, center, radius)
    return Ball(
        center=center,
        radius=float(radius),
        members=_readonly(members),
        mass=float(space.mass[members].sum()),
    )


def validate_metric(
    space: FiniteMetricMeasureSpace, seed: int = 0
) -> Report:
    """Scan a space for metric-axiom violations.

    Symmetry and positivity are checked on every pair. The triangle
    inequality is checked exhaustively over all triples when
    ``n <= EXHAUSTIVE_TRIPLE_LIMIT`` and on ``TRIANGLE_SAMPLE_SIZE``
    seeded random triples above. Each violating pair (i, j) is reported
    once, with the witness k that violates it most.

    Parameters
    ----------
    space : FiniteMetricMeasureSpace
    seed : int, optional (default=0)
        Seed for triple sampling on large spaces.

    Returns
    -------
    report : Report
        Tables ``symmetry``, ``positivity`` and ``triangle`` list the
        violations (point identifiers and amounts).
    """

    report = Report(name="validate_metric")
    n = space.n
    ids = space.ids
    scale = max(space.diameter, 1.0)
    tolerance = TRIANGLE_RTOL * scale

    symmetry_rows, positivity_rows, triangle_rows = [], [], []

    for i in range(n):
        row = space.distance_row(i)
        if row[i] != 0:
            positivity_rows.append((ids[i], ids[i], float(row[i])))
        for j in np.flatnonzero(~np.isfinite(row) | (row < 0)):
            if j != i:
                positivity_rows.append((ids[i], ids[int(j)], float(row[j])))
        for j in np.flatnonzero(row[i + 1 :] <= 0) + i + 1:
            positivity_rows.append((ids[i], ids[int(j)], float(row[j])))
        if space.table is not None:
            column = space.table[:, i]
            for j in np.flatnonzero(row[i + 1 :] != column[i + 1 :]) + i + 1:
                symmetry_rows.append((ids[i], ids[int(j)], float(row[j]), float(column[j])))

    exhaustive = n <= EXHAUSTIVE_TRIPLE_LIMIT
    if exhaustive:
        table = space.dist
        for i in range(n):
            through = table[i][:, None] + table  # through[k, j] = d(i,k) + d(k,j)
            best = through.min(axis=0)
            witness = through.argmin(axis=0)
            excess = table[i] - best
            for j in np.flatnonzero(excess[i + 1 :] > tolerance) + i + 1:
                k = int(witness[j])
                triangle_rows.append(
                    (ids[i], ids[int(j)], ids[k], float(table[i, j]), float(best[j]), float(excess[j]))
                )
        triples = n**3
    else:
        rng = np.random.default_rng(seed)
        triples = TRIANGLE_SAMPLE_SIZE
        sample = rng.integers(0, n, size=(TRIANGLE_SAMPLE_SIZE, 3))
        worst: dict[tuple[int, int], tuple[int, float, float]] = {}
        for i, j, k in sample:
            d_ij = space.distance(i, j)
            through = space.distance(i, k) + space.distance(k, j)
            if d_ij - through > tolerance:
                key = (min(i, j), max(i, j))
                if key not in worst or d_ij - through > worst[key][2]:
                    worst[key] = (int(k), through, d_ij - through)
        for (i, j), (k, through, excess) in sorted(worst.items()):
            triangle_rows.append(
                (ids[i], ids[j], ids[k], space.distance(i, j), through, excess)
            )

    report.tables["symmetry"] = pd.DataFrame(
        symmetry_rows, columns=["a", "b", "d_ab", "d_ba"]
    )
    report.tables["positivity"] = pd.DataFrame(positivity_rows, columns=["a", "b", "d_ab"])
    report.tables["triangle"] = pd.DataFrame(
        triangle_rows, columns=["a", "b", "via", "d_ab", "d_via", "excess"]
    )
    report.values.update(
        {"n": n, "exhaustive": exhaustive, "triples_scanned": int(triples), "tolerance": tolerance}
    )
    report.record("symmetry", not symmetry_rows, worst=len(symmetry_rows), bound=0)
    report.record("positivity", not positivity_rows, worst=len(positivity_rows), bound=0)
    report.record("triangle", not triangle_rows, worst=len(triangle_rows), bound=0)
    return report
