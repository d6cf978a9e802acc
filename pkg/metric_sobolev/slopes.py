"""
Finite-scale slopes, Lipschitz constants and upper-gradient checks along
discrete curves.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Union

import numpy as np
import pandas as pd
from scipy.sparse import csgraph

from ._typing import FloatArray, IndexArray, PointPair
from .energy import discrete_gradient_field, project_cells
from .exceptions import InvalidParameterError
from .generators import edge_weights
from .partition import NeighborGraph, Partition
from .report import Report
from .space import FiniteMetricMeasureSpace, field_values
from .utils.validating import validate_count, validate_positive


@dataclass(frozen=True, eq=False)
class DiscreteCurve:
    """Vertex path through a space.

    Attributes
    ----------
    vertices : array of int
    segment_lengths : array of float
        Distances between consecutive vertices.
    total_length : float
    """

    vertices: IndexArray
    segment_lengths: FloatArray
    total_length: float

    @classmethod
    def from_vertices(
        cls, space: FiniteMetricMeasureSpace, vertices: Sequence[Union[int, str]]
    ) -> "DiscreteCurve":
        """Build a curve from point indices or identifiers.

        Raises
        ------
        InvalidParameterError
            Empty path, unknown point, or repeated consecutive vertex.
        """

        if not len(vertices):
            raise InvalidParameterError("A curve needs at least one vertex.")
        indices = np.array([space.index_of(vertex) for vertex in vertices], dtype=np.intp)
        if np.any(indices[1:] == indices[:-1]):
            raise InvalidParameterError("Consecutive curve vertices must be distinct.")
        lengths = np.array(
            [space.distance(a, b) for a, b in zip(indices[:-1], indices[1:])], dtype=float
        )
        return cls(vertices=indices, segment_lengths=lengths, total_length=float(lengths.sum()))

    def __len__(self) -> int:
        return self.vertices.size


@dataclass(frozen=True, eq=False)
class SlopeField:
    """Nonnegative per-point estimate at scale radius.

    Attributes
    ----------
    values : array of float
    radius : float
    empty_ball_count : int
        Points whose ball held no other point (value set to 0).
    """

    values: FloatArray
    radius: float
    empty_ball_count: int = 0


def slope_estimate(space: FiniteMetricMeasureSpace, f, r: float) -> SlopeField:
    """max over 0 < d(x, y) < r of |f(y) - f(x)| / d(x, y), per point x."""

    r = validate_positive("r", r)
    values = field_values(space, f)
    slopes = np.zeros(space.n)
    empty = 0
    for x in range(space.n):
        row = space.distance_row(x)
        near = (row > 0) & (row < r)
        if not near.any():
            empty += 1
            continue
        slopes[x] = np.max(np.abs(values[near] - values[x]) / row[near])
    return SlopeField(values=slopes, radius=r, empty_ball_count=empty)


def ball_lipschitz(
    space: FiniteMetricMeasureSpace, values: FloatArray, center: int, radius: float
) -> float:
    """Lip(f, B(center, radius)) by scanning all pairs of the open ball."""

    members = np.flatnonzero(space.distance_row(center) < radius)
    if members.size < 2:
        return 0.0
    table = space.distance_rows(members)[:, members]
    differences = np.abs(values[members][:, None] - values[members][None, :])
    off_diagonal = table > 0
    return float(np.max(differences[off_diagonal] / table[off_diagonal]))


def asymptotic_lip_estimate(space: FiniteMetricMeasureSpace, f, r: float) -> SlopeField:
    """Lip(f, B(x, r)) per point x, the finite-scale surrogate of Lip_a."""

    r = validate_positive("r", r)
    values = field_values(space, f)
    estimates = np.array([ball_lipschitz(space, values, x, r) for x in range(space.n)])
    empty = int(sum(np.count_nonzero(space.distance_row(x) < r) < 2 for x in range(space.n)))
    return SlopeField(values=estimates, radius=r, empty_ball_count=empty)


def lipschitz_constant(space: FiniteMetricMeasureSpace, f) -> float:
    """Global Lipschitz constant of f over all pairs of distinct points."""

    values = field_values(space, f)
    best = 0.0
    for x in range(space.n - 1):
        row = space.distance_row(x)[x + 1 :]
        if row.size:
            best = max(best, float(np.max(np.abs(values[x + 1 :] - values[x]) / row)))
    return best


def curve_integral(g: FloatArray, curve: DiscreteCurve) -> float:
    """Trapezoid sum of g along the curve."""

    along = g[curve.vertices]
    return float(np.sum((along[:-1] + along[1:]) / 2 * curve.segment_lengths))


def curve_upper_gradient_check(
    space: FiniteMetricMeasureSpace, f, g, curve: DiscreteCurve
) -> float:
    """Return integral of g along curve minus |f(end) - f(start)|.

    A nonnegative result means g is an upper gradient of f on this curve.
    """

    f_values = field_values(space, f)
    g_values = field_values(space, g)
    if len(curve) < 2:
        return 0.0
    jump = abs(f_values[curve.vertices[-1]] - f_values[curve.vertices[0]])
    return curve_integral(g_values, curve) - jump


def discrete_wug_check(
    space: FiniteMetricMeasureSpace,
    partition: Partition,
    graph: NeighborGraph,
    u,
    curves: Sequence[DiscreteCurve],
    q: float = 2.0,
    tol: float = 1e-12,
) -> Report:
    """Check that 4 |D_delta u| is an upper gradient of P_delta u up to scale delta/2.

    For every curve and every vertex sub-path (a, b) longer than delta/2
    the residual ``4 * sum |D_delta u| len - |P u(b) - P u(a)|`` is
    computed; the report keeps the worst residual per curve. Curves not
    longer than delta/2 are skipped and counted, and so are curves with a
    step between two cells that are not neighbors, which the partition
    cannot resolve at this scale.
    """

    half_scale = partition.delta / 2
    cell_value = project_cells(space, partition, u).values
    gradient = discrete_gradient_field(space, partition, graph, u, q).values
    point_value = cell_value[partition.labels]
    point_gradient = gradient[partition.labels]
    adjacency = graph.adjacency

    report = Report(name="discrete_wug_check")
    rows = []
    skipped = 0
    coarse = 0
    for index, curve in enumerate(curves):
        if curve.total_length <= half_scale:
            skipped += 1
            continue
        cells = partition.labels[curve.vertices]
        moved = cells[:-1] != cells[1:]
        if np.any(moved):
            linked = np.asarray(adjacency[cells[:-1][moved], cells[1:][moved]]).ravel()
            if not np.all(linked):
                coarse += 1
                continue
        along = point_gradient[curve.vertices]
        pieces = (along[:-1] + along[1:]) / 2 * curve.segment_lengths
        integral = np.concatenate([[0.0], np.cumsum(pieces)])
        length = np.concatenate([[0.0], np.cumsum(curve.segment_lengths)])
        values = point_value[curve.vertices]

        span = length[None, :] - length[:, None]
        valid = span > half_scale
        residual = 4 * (integral[None, :] - integral[:, None]) - np.abs(
            values[None, :] - values[:, None]
        )
        worst = float(residual[valid].min())
        rows.append(
            {
                "curve": index,
                "vertices": len(curve),
                "length": curve.total_length,
                "subintervals": int(valid.sum()),
                "worst_residual": worst,
            }
        )

    if skipped:
        report.warn(f"{skipped} curves not longer than delta/2 = {half_scale} were skipped.")
    if coarse:
        report.warn(
            f"{coarse} curves step between non-neighbor cells at delta = {partition.delta} "
            "and were skipped."
        )
    table = pd.DataFrame(
        rows, columns=["curve", "vertices", "length", "subintervals", "worst_residual"]
    )
    report.tables["curves"] = table
    worst = float(table["worst_residual"].min()) if len(table) else 0.0
    report.values.update(
        {
            "delta": partition.delta,
            "q": q,
            "checked_curves": len(table),
            "skipped_curves": skipped,
            "coarse_curves": coarse,
            "subintervals": int(table["subintervals"].sum()) if len(table) else 0,
            "min_slack": worst,
        }
    )
    report.record(
        "weak_upper_gradient",
        worst >= -tol,
        worst=worst,
        bound=-tol,
        detail="4 |D u| integrated along sub-paths longer than delta/2 dominates the jump of P u",
    )
    return report


def monotone_paths(
    space: FiniteMetricMeasureSpace, count: int, seed: int = 0
) -> list[DiscreteCurve]:
    """Random coordinate-monotone paths on interval or grid spaces.

    On an interval the path visits every point between two random
    endpoints in order. On a grid (identifiers ``"i,j"``) it is a random
    staircase moving one step in i or j at a time.

    Raises
    ------
    InvalidParameterError
        The space is neither an interval nor a grid.
    """

    validate_count("count", count, minimum=1)
    rng = np.random.default_rng(seed)
    curves = []
    if all("," in point_id for point_id in space.ids):
        side = int(round(np.sqrt(space.n)))
        if side * side != space.n:
            raise InvalidParameterError("Grid identifiers need a square number of points.")
        for _ in range(count):
            while True:
                i0, i1 = np.sort(rng.integers(0, side, size=2))
                j0, j1 = np.sort(rng.integers(0, side, size=2))
                if i1 > i0 or j1 > j0:
                    break
            moves = np.array([0] * (i1 - i0) + [1] * (j1 - j0))
            rng.shuffle(moves)
            i, j = i0, j0
            path = [f"{i},{j}"]
            for move in moves:
                if move == 0:
                    i += 1
                else:
                    j += 1
                path.append(f"{i},{j}")
            curves.append(DiscreteCurve.from_vertices(space, path))
        return curves

    if space.coords is None or np.any(space.coords[:, 1] != 0):
        raise InvalidParameterError("Monotone paths need an interval or grid space.")
    order = np.argsort(space.coords[:, 0], kind="stable")
    for _ in range(count):
        a, b = np.sort(rng.choice(space.n, size=2, replace=False))
        curves.append(DiscreteCurve.from_vertices(space, order[a : b + 1].tolist()))
    return curves


def center_random_walks(
    space: FiniteMetricMeasureSpace,
    partition: Partition,
    graph: NeighborGraph,
    count: int,
    steps: int,
    seed: int = 0,
) -> list[DiscreteCurve]:
    """Random walks on the neighbor graph, through the cell centers."""

    validate_count("count", count, minimum=1)
    validate_count("steps", steps, minimum=1)
    connected = np.flatnonzero(graph.degree > 0)
    if connected.size == 0:
        return []
    rng = np.random.default_rng(seed)
    curves = []
    for _ in range(count):
        cell = int(rng.choice(connected))
        path = [cell]
        for _ in range(steps):
            cell = int(rng.choice(graph.neighbors(cell)))
            path.append(cell)
        curves.append(DiscreteCurve.from_vertices(space, partition.centers[path].tolist()))
    return curves


def geodesic_paths(
    space: FiniteMetricMeasureSpace, pairs: Sequence[PointPair]
) -> list[DiscreteCurve]:
    """Shortest edge paths between point pairs of a graph space."""

    if space.metric != "graph" or not space.edges:
        raise InvalidParameterError("Geodesic paths need a graph space with an edge list.")
    weights = edge_weights(space.ids, space.edges)
    sources = sorted({int(a) for a, _ in pairs})
    _, predecessors = csgraph.shortest_path(
        weights, method="D", directed=False, indices=sources, return_predecessors=True
    )
    row_of = {source: k for k, source in enumerate(sources)}

    curves = []
    for a, b in pairs:
        a, b = int(a), int(b)
        path = [b]
        while path[-1] != a:
            previous = predecessors[row_of[a], path[-1]]
            if previous < 0:
                raise InvalidParameterError(f"No path between points {a} and {b}.")
            path.append(int(previous))
        curves.append(DiscreteCurve.from_vertices(space, path[::-1]))
    return curves
