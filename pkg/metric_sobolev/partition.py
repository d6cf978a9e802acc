"""
Scale-delta partitions of a finite metric measure space and their
neighbor relation.
"""

import functools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
from scipy import sparse

from ._typing import CellPair, FloatArray, IndexArray
from .exceptions import InvalidParameterError, MismatchError
from .report import Report
from .space import FiniteMetricMeasureSpace
from .utils.validating import validate_positive


@dataclass(frozen=True, eq=False)
class Partition:
    """Cells A_i with centers z_i at scale delta.

    Parameters
    ----------
    delta : float
        Scale; distinct centers are more than delta apart.
    eps : float
        Assignment slack, 0 <= eps <= delta / 8.
    centers : array of int
        Point index of each cell's center, in selection order.
    labels : array of int
        Cell index of every point.
    space_id : str

    Attributes
    ----------
    cells : tuple of arrays of int
        Member point indices per cell, ascending.
    cell_mass : array of float
        m(A_i) per cell.
    partition_id : str
    """

    delta: float
    eps: float
    centers: IndexArray
    labels: IndexArray
    cell_mass: FloatArray
    space_id: str
    cells: tuple[IndexArray, ...] = field(repr=False)

    @property
    def n_cells(self) -> int:
        return len(self.centers)

    @property
    def partition_id(self) -> str:
        return f"{self.space_id}:{self.delta!r}:{self.eps!r}"


def build_partition(
    space: FiniteMetricMeasureSpace, delta: float, eps: Optional[float] = None
) -> Partition:
    """Greedy delta-partition of a finite space.

    Centers are taken in input point order: a point becomes a center when
    it lies outside every CLOSED ball B[z_j, delta] of earlier centers.
    Each point then joins the least center index i with
    ``d(x, z_i) <= min_j d(x, z_j) + eps``.

    Parameters
    ----------
    space : FiniteMetricMeasureSpace
    delta : float
        Positive scale.
    eps : float, optional (default=delta / 8)
        Assignment slack in [0, delta / 8].

    Returns
    -------
    partition : Partition

    Raises
    ------
    InvalidParameterError
        delta <= 0 or eps outside [0, delta / 8].

    Examples
    --------
    >>> from metric_sobolev.generators import interval
    >>> build_partition(interval(3), 0.6, 0.075).centers.tolist()
    [0, 2]
    """

    delta = validate_positive("delta", delta)
    eps = delta / 8 if eps is None else float(eps)
    if not 0 <= eps <= delta / 8:
        raise InvalidParameterError(
            f"eps must lie in [0, delta/8] = [0, {delta / 8}], not '{eps}'."
        )

    excluded = np.zeros(space.n, dtype=bool)
    centers = []
    for point in range(space.n):
        if not excluded[point]:
            centers.append(point)
            excluded |= space.distance_row(point) <= delta
    centers = np.asarray(centers, dtype=np.intp)

    to_centers = space.distance_rows(centers)
    nearest = to_centers.min(axis=0)
    labels = np.argmax(to_centers <= nearest + eps, axis=0).astype(np.intp)

    cells = tuple(np.flatnonzero(labels == i) for i in range(len(centers)))
    cell_mass = np.bincount(labels, weights=space.mass, minlength=len(centers))
    for array in (centers, labels, cell_mass, *cells):
        array.flags.writeable = False
    return Partition(
        delta=delta,
        eps=eps,
        centers=centers,
        labels=labels,
        cell_mass=cell_mass,
        space_id=space.space_id,
        cells=cells,
    )


@dataclass(frozen=True, eq=False)
class NeighborGraph:
    """Cells at set distance strictly less than delta.

    Parameters
    ----------
    pairs : tuple of (int, int)
        Unordered neighbor pairs stored as (i, j) with i < j, sorted.
    degree : array of int
        Neighbor count per cell.
    partition_id : str
    """

    pairs: tuple[CellPair, ...]
    degree: IndexArray
    partition_id: str

    @property
    def n_cells(self) -> int:
        return len(self.degree)

    @functools.cached_property
    def adjacency(self) -> sparse.csr_matrix:
        """Symmetric 0/1 adjacency matrix."""
        n = self.n_cells
        if not self.pairs:
            return sparse.csr_matrix((n, n))
        i, j = np.array(self.pairs).T
        data = np.ones(2 * len(i))
        return sparse.csr_matrix(
            (data, (np.concatenate([i, j]), np.concatenate([j, i]))), shape=(n, n)
        )

    @functools.cached_property
    def ordered_pairs(self) -> IndexArray:
        """Both orientations of every pair, lexicographically sorted."""
        if not self.pairs:
            return np.empty((0, 2), dtype=np.intp)
        forward = np.array(self.pairs, dtype=np.intp)
        both = np.vstack([forward, forward[:, ::-1]])
        return both[np.lexsort((both[:, 1], both[:, 0]))]

    def neighbors(self, cell: int) -> IndexArray:
        row = self.adjacency.getrow(cell)
        return np.sort(row.indices)


def check_partition(space: FiniteMetricMeasureSpace, partition: Partition) -> None:
    """Raise MismatchError unless partition was built on space."""

    if partition.space_id != space.space_id:
        raise MismatchError(
            f"Partition was built on space '{partition.space_id}', "
            f"not '{space.space_id}'."
        )


def check_graph(partition: Partition, graph: NeighborGraph) -> None:
    """Raise MismatchError unless graph belongs to partition."""

    if graph.partition_id != partition.partition_id:
        raise MismatchError(
            f"Neighbor graph belongs to partition '{graph.partition_id}', "
            f"not '{partition.partition_id}'."
        )


def neighbor_graph(space: FiniteMetricMeasureSpace, partition: Partition) -> NeighborGraph:
    """Neighbor relation between the cells of a partition.

    Cells A_i and A_j (i != j) are neighbors when some x in A_i and y in
    A_j satisfy d(x, y) < delta. Ties at exactly delta do not count.

    Raises
    ------
    MismatchError
        partition was built on another space.
    """

    check_partition(space, partition)
    pairs: set[CellPair] = set()
    for point in range(space.n):
        own = int(partition.labels[point])
        reached = np.unique(partition.labels[space.distance_row(point) < partition.delta])
        for other in reached:
            if other != own:
                pairs.add((min(own, int(other)), max(own, int(other))))

    degree = np.zeros(partition.n_cells, dtype=np.intp)
    for i, j in pairs:
        degree[i] += 1
        degree[j] += 1
    degree.flags.writeable = False
    return NeighborGraph(
        pairs=tuple(sorted(pairs)), degree=degree, partition_id=partition.partition_id
    )


def partition_diagnostics(
    space: FiniteMetricMeasureSpace,
    partition: Partition,
    graph: NeighborGraph,
    doubling=None,
) -> Report:
    """Audit a partition and its neighbor graph.

    Checks center separation (> delta), containment of every cell in
    B(z_i, 5 delta / 4), membership of every point of B(z_i, delta / 3)
    in cell i, neighbor center distances (<= 4 delta) and the degree
    bound max degree <= c_D**3 with c_D the metric doubling constant.

    Parameters
    ----------
    space, partition, graph
        A consistent triple.
    doubling : DoublingReport, optional
        Precomputed doubling constants; measured on the default ball
        grid when omitted.

    Returns
    -------
    report : Report
    """

    from .diagnostics import default_ball_grid, doubling_constants

    check_partition(space, partition)
    check_graph(partition, graph)
    report = Report(name="partition_diagnostics")
    delta = partition.delta
    centers = partition.centers

    center_rows = space.distance_rows(centers)
    center_table = center_rows[:, centers]
    if partition.n_cells > 1:
        off_diagonal = center_table[~np.eye(partition.n_cells, dtype=bool)]
        separation = float(off_diagonal.min())
    else:
        separation = np.inf
    report.record(
        "center_separation",
        separation > delta,
        worst=separation,
        bound=delta,
        detail="min distance between distinct centers must exceed delta",
    )

    own = center_rows[partition.labels, np.arange(space.n)]
    report.record(
        "containment",
        bool(np.all(own < 1.25 * delta)),
        worst=float(own.max()),
        bound=1.25 * delta,
        detail="every point lies in the open ball B(z_i, 5 delta / 4) of its center",
    )

    inner = center_rows < delta / 3
    elsewhere = partition.labels[None, :] != np.arange(partition.n_cells)[:, None]
    stray = int(np.sum(inner & elsewhere))
    report.record(
        "inner_ball",
        stray == 0,
        worst=stray,
        bound=0,
        detail="points of B(z_i, delta / 3) outside cell i",
    )

    if graph.pairs:
        i, j = np.array(graph.pairs).T
        neighbor_distance = center_table[i, j]
        worst_neighbor = float(neighbor_distance.max())
    else:
        neighbor_distance = np.empty(0)
        worst_neighbor = 0.0
    report.record(
        "neighbor_distance",
        worst_neighbor <= 4 * delta,
        worst=worst_neighbor,
        bound=4 * delta,
        detail="neighbor centers are at most 4 delta apart",
    )

    if doubling is None:
        doubling = doubling_constants(space, default_ball_grid(space))
    c_d = doubling.values["c_D_metric"]
    max_degree = int(graph.degree.max()) if graph.n_cells else 0
    report.record(
        "degree_bound",
        max_degree <= c_d**3,
        worst=max_degree,
        bound=c_d**3,
        detail="max neighbor count is at most c_D_metric cubed",
    )

    isolated = int(np.sum(graph.degree == 0))
    report.values.update(
        {
            "delta": delta,
            "eps": partition.eps,
            "n_cells": partition.n_cells,
            "n_pairs": len(graph.pairs),
            "max_degree": max_degree,
            "c_D_metric": c_d,
            "isolated_cell_fraction": isolated / partition.n_cells,
        }
    )
    report.tables["cells"] = pd.DataFrame(
        {
            "center": [space.ids[c] for c in centers],
            "size": [cell.size for cell in partition.cells],
            "mass": partition.cell_mass,
            "degree": graph.degree,
            "radius": [
                float(center_rows[k, cell].max()) for k, cell in enumerate(partition.cells)
            ],
        }
    )
    report.tables["neighbors"] = pd.DataFrame(
        {
            "i": [pair[0] for pair in graph.pairs],
            "j": [pair[1] for pair in graph.pairs],
            "center_distance": neighbor_distance,
        }
    )
    return report
