"""
Reading and writing spaces, curves, ball grids and partitions.

Space file (JSON)::

    {"points": [{"id": "a", "coords": [x, y], "mass": 1.0}, ...],
     "metric": "euclidean" | "graph" | {"table": [[...], ...]},
     "edges": [["a", "b", 1.5], ...]}

Numbers are written with 17 significant digits so a save/load round
trip reproduces distances and masses bit-exactly.
"""

import json
import os
from collections.abc import Sequence
from typing import Any, Union

import numpy as np
import pandas as pd

from ._typing import JSONDict, BallGrid
from .exceptions import (
    DisconnectedGraphError,
    InvalidParameterError,
    MetricViolationError,
    SpaceFormatError,
)
from .generators import graph
from .partition import NeighborGraph, Partition
from .slopes import DiscreteCurve
from .space import FiniteMetricMeasureSpace, validate_metric
from .utils.saving import dumps

PathLike = Union[str, os.PathLike]


def _read_json(path: PathLike) -> Any:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError as missing:
        raise SpaceFormatError(f"File '{path}' does not exist.") from missing
    except json.JSONDecodeError as bad_json:
        raise SpaceFormatError(f"File '{path}' is not valid JSON: {bad_json}") from bad_json


def _write(path: PathLike, text: str) -> None:
    directory = os.path.dirname(os.fspath(path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text + "\n")


def space_to_dict(space: FiniteMetricMeasureSpace) -> JSONDict:
    points = []
    for k, point_id in enumerate(space.ids):
        point = {"id": point_id, "mass": float(space.mass[k])}
        if space.coords is not None:
            point["coords"] = [float(c) for c in space.coords[k]]
        points.append(point)
    content: JSONDict = {"points": points}
    if space.metric == "euclidean" and space.coords is not None:
        content["metric"] = "euclidean"
    elif space.metric == "graph" and space.edges:
        content["metric"] = "graph"
        content["edges"] = [[a, b, float(length)] for a, b, length in space.edges]
    else:
        content["metric"] = {"table": space.dist.tolist()}
    return content


def save_space(space: FiniteMetricMeasureSpace, path: PathLike) -> str:
    """Write a space file."""

    _write(path, dumps(space_to_dict(space)))
    return os.fspath(path)


def _parse_points(content: Any, path: PathLike) -> tuple[list[str], np.ndarray, Any]:
    if not isinstance(content, dict) or "points" not in content or "metric" not in content:
        raise SpaceFormatError(f"Space file '{path}' needs 'points' and 'metric' entries.")
    points = content["points"]
    if not isinstance(points, list) or not points:
        raise SpaceFormatError(f"Space file '{path}' has no points.")
    try:
        ids = [str(point["id"]) for point in points]
        mass = np.array([float(point["mass"]) for point in points])
    except (KeyError, TypeError, ValueError) as bad_point:
        raise SpaceFormatError(
            f"Every point in '{path}' needs an 'id' and a numeric 'mass'."
        ) from bad_point
    if len(set(ids)) != len(ids):
        raise SpaceFormatError(f"Space file '{path}' repeats point identifiers.")
    coords = None
    if all("coords" in point for point in points):
        try:
            coords = np.array([[float(c) for c in point["coords"]] for point in points])
        except (TypeError, ValueError) as bad_coords:
            raise SpaceFormatError(f"Non-numeric coordinates in '{path}'.") from bad_coords
        if coords.ndim != 2:
            raise SpaceFormatError(f"Coordinates in '{path}' must share one dimension.")
    return ids, mass, coords


def _raise_first_violation(space: FiniteMetricMeasureSpace) -> None:
    report = validate_metric(space)
    symmetry = report.tables["symmetry"]
    if len(symmetry):
        a, b = symmetry.iloc[0][["a", "b"]]
        raise MetricViolationError(f"Distance table is not symmetric at ({a}, {b}).", (a, b))
    positivity = report.tables["positivity"]
    if len(positivity):
        a, b = positivity.iloc[0][["a", "b"]]
        raise MetricViolationError(f"Distance ({a}, {b}) breaks positivity.", (a, b))
    triangle = report.tables["triangle"]
    if len(triangle):
        a, b, via = triangle.iloc[0][["a", "b", "via"]]
        raise MetricViolationError(
            f"Triangle inequality fails for ({a}, {b}) through {via}.", (a, b, via)
        )


def load_space(path: PathLike) -> FiniteMetricMeasureSpace:
    """Read and validate a space file.

    Raises
    ------
    SpaceFormatError
        Malformed file.
    MetricViolationError
        The distances break symmetry, positivity or the triangle
        inequality; the error names the violating pair or triple.
    """

    content = _read_json(path)
    ids, mass, coords = _parse_points(content, path)
    metric = content["metric"]
    name = os.path.basename(os.fspath(path))
    try:
        if metric == "euclidean":
            if coords is None:
                raise SpaceFormatError(f"Euclidean space '{path}' needs coordinates.")
            space = FiniteMetricMeasureSpace.from_coordinates(
                coords, mass=mass, ids=ids, name=name
            )
        elif metric == "graph":
            space = _graph_space(content, ids, mass, coords, name, path)
        elif isinstance(metric, dict) and "table" in metric:
            table = np.array(metric["table"], dtype=float)
            if table.shape != (len(ids), len(ids)):
                raise SpaceFormatError(
                    f"Distance table in '{path}' must be {len(ids)}x{len(ids)}."
                )
            space = FiniteMetricMeasureSpace.from_table(
                ids=ids, table=table, mass=mass, coords=coords, name=name
            )
        else:
            raise SpaceFormatError(f"Unknown metric entry in '{path}'.")
    except (InvalidParameterError, TypeError, ValueError) as bad_content:
        if isinstance(bad_content, (SpaceFormatError, DisconnectedGraphError)):
            raise
        raise SpaceFormatError(f"Invalid space file '{path}': {bad_content}") from bad_content

    _raise_first_violation(space)
    return space


def _graph_space(content, ids, mass, coords, name, path) -> FiniteMetricMeasureSpace:
    edges = content.get("edges")
    if not isinstance(edges, list) or not edges:
        raise SpaceFormatError(f"Graph space '{path}' needs a nonempty 'edges' list.")
    try:
        edges = [(str(a), str(b), float(length)) for a, b, length in edges]
    except (TypeError, ValueError) as bad_edge:
        raise SpaceFormatError(f"Edges in '{path}' must be [id, id, length].") from bad_edge
    unknown = {node for a, b, _ in edges for node in (a, b)} - set(ids)
    if unknown:
        raise SpaceFormatError(f"Edges in '{path}' name unknown points {sorted(unknown)}.")
    built = graph(edges, name=name)
    if built.n < len(ids):
        raise DisconnectedGraphError(f"Graph space '{path}' has points without edges.")
    order = [built.index_of(point_id) for point_id in ids]
    return FiniteMetricMeasureSpace.from_table(
        ids=ids,
        table=built.dist[np.ix_(order, order)],
        mass=mass,
        coords=coords,
        metric="graph",
        edges=edges,
        name=name,
    )


def save_curves(
    space: FiniteMetricMeasureSpace, curves: Sequence[DiscreteCurve], path: PathLike
) -> str:
    """Write curves as lists of point identifiers."""

    content = {"curves": [[space.ids[v] for v in curve.vertices] for curve in curves]}
    _write(path, dumps(content))
    return os.fspath(path)


def load_curves(space: FiniteMetricMeasureSpace, path: PathLike) -> list[DiscreteCurve]:
    """Read a curve file ``{"curves": [[id, ...], ...]}``.

    Raises
    ------
    SpaceFormatError
        Malformed file.
    InvalidParameterError
        A curve names an unknown point or repeats a vertex consecutively.
    """

    content = _read_json(path)
    if not isinstance(content, dict) or not isinstance(content.get("curves"), list):
        raise SpaceFormatError(f"Curve file '{path}' needs a 'curves' list.")
    return [
        DiscreteCurve.from_vertices(space, [str(v) for v in curve])
        for curve in content["curves"]
    ]


def load_ball_grid(space: FiniteMetricMeasureSpace, path: PathLike) -> BallGrid:
    """Read a CSV ball grid with columns ``point_id,radius``."""

    try:
        table = pd.read_csv(path, dtype=str)
    except (FileNotFoundError, pd.errors.ParserError, pd.errors.EmptyDataError) as bad_file:
        raise SpaceFormatError(f"Cannot read ball grid '{path}': {bad_file}") from bad_file
    if not {"point_id", "radius"} <= set(table.columns):
        raise SpaceFormatError(f"Ball grid '{path}' needs columns point_id and radius.")
    try:
        radii = table["radius"].astype(float)
    except ValueError as bad_radius:
        raise SpaceFormatError(f"Non-numeric radius in ball grid '{path}'.") from bad_radius
    return [
        (space.index_of(point_id), float(radius))
        for point_id, radius in zip(table["point_id"], radii)
    ]


def partition_to_dict(
    space: FiniteMetricMeasureSpace, partition: Partition, neighbors: NeighborGraph
) -> JSONDict:
    return {
        "delta": partition.delta,
        "eps": partition.eps,
        "cells": [
            {
                "center": space.ids[center],
                "members": [space.ids[member] for member in cell],
            }
            for center, cell in zip(partition.centers, partition.cells)
        ],
        "neighbors": [list(pair) for pair in neighbors.pairs],
    }


def save_partition(
    space: FiniteMetricMeasureSpace,
    partition: Partition,
    neighbors: NeighborGraph,
    path: PathLike,
) -> str:
    """Write a partition with its neighbor pairs."""

    _write(path, dumps(partition_to_dict(space, partition, neighbors)))
    return os.fspath(path)
