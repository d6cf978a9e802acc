"""
Generators for test spaces.

Every generator returns a FiniteMetricMeasureSpace satisfying the metric
axioms. Specs are strings such as ``"interval(101)"`` or
``"geometric_graph(200, 0.15, 3)"``; a spec naming an existing file is
loaded with :func:`metric_sobolev.io.load_space`.
"""

import os
import re
from collections.abc import Callable, Sequence
from typing import Any

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial.distance import cdist

from ._typing import Edge
from .exceptions import ConfigurationError, DisconnectedGraphError, InvalidParameterError
from .space import FiniteMetricMeasureSpace
from .utils.validating import sort_dict_by_keys, validate_count, validate_positive

_SPEC_PATTERN = re.compile(r"^\s*([A-Za-z_][\w-]*)\s*(?:\((.*)\))?\s*$")


def interval(n: int) -> FiniteMetricMeasureSpace:
    """n equispaced points on [0, 1] with mass 1/n each.

    Examples
    --------
    >>> space = interval(3)
    >>> space.distance(0, 2)
    1.0
    """

    validate_count("n", n, minimum=2)
    x = np.linspace(0.0, 1.0, n)
    coords = np.column_stack([x, np.zeros(n)])
    return FiniteMetricMeasureSpace.from_coordinates(
        coords, mass=np.full(n, 1.0 / n), name=f"interval({n})"
    )


def grid2d(n: int) -> FiniteMetricMeasureSpace:
    """n x n grid on the unit square with mass 1/n^2 each."""

    validate_count("n", n, minimum=2)
    axis = np.linspace(0.0, 1.0, n)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    coords = np.column_stack([xx.ravel(), yy.ravel()])
    ids = [f"{i},{j}" for i in range(n) for j in range(n)]
    return FiniteMetricMeasureSpace.from_coordinates(
        coords, mass=np.full(n * n, 1.0 / n**2), ids=ids, name=f"grid2d({n})"
    )


def circle(n: int) -> FiniteMetricMeasureSpace:
    """n equispaced points on a circle of circumference 1, arc-length metric."""

    validate_count("n", n, minimum=2)
    k = np.arange(n)
    steps = np.abs(k[:, None] - k[None, :])
    table = np.minimum(steps, n - steps) / n
    angle = 2 * np.pi * k / n
    coords = np.column_stack([np.cos(angle), np.sin(angle)]) / (2 * np.pi)
    return FiniteMetricMeasureSpace.from_table(
        ids=[str(i) for i in k],
        table=table,
        mass=np.full(n, 1.0 / n),
        coords=coords,
        name=f"circle({n})",
    )


def koch_vertices(level: int) -> np.ndarray:
    """Vertices of the Von Koch prefractal over the unit segment.

    Each segment is cut at its one-third points and the middle third is
    replaced by the two sides of an outward equilateral bump.

    Returns
    -------
    numpy.ndarray of shape (4**level + 1, 2)
    """

    validate_count("level", level, minimum=0)
    points = np.array([0.0 + 0.0j, 1.0 + 0.0j])
    rotation = np.exp(1j * np.pi / 3)
    for _ in range(level):
        start, end = points[:-1], points[1:]
        step = (end - start) / 3.0
        first = start + step
        apex = first + step * rotation
        second = start + 2.0 * step
        refined = np.column_stack([start, first, apex, second]).ravel()
        points = np.append(refined, points[-1])
    return np.column_stack([points.real, points.imag])


def koch(level: int) -> FiniteMetricMeasureSpace:
    """Prefractal vertex set of the Von Koch curve, equal masses."""

    coords = koch_vertices(level)
    n = coords.shape[0]
    return FiniteMetricMeasureSpace.from_coordinates(
        coords, mass=np.full(n, 1.0 / n), name=f"koch({level})"
    )


def cloud(n: int, seed: int = 0) -> FiniteMetricMeasureSpace:
    """n uniform random points in the unit square, mass 1/n each."""

    validate_count("n", n, minimum=2)
    coords = np.random.default_rng(seed).random((n, 2))
    return FiniteMetricMeasureSpace.from_coordinates(
        coords, mass=np.full(n, 1.0 / n), name=f"cloud({n}, {seed})"
    )


def edge_weights(ids: Sequence[str], edges: Sequence[Edge]) -> sparse.csr_matrix:
    """Sparse upper-triangular edge-length matrix; parallel edges keep the shortest."""

    index = {point_id: i for i, point_id in enumerate(ids)}
    shortest: dict[tuple[int, int], float] = {}
    for a, b, length in edges:
        i, j = sorted((index[str(a)], index[str(b)]))
        shortest[i, j] = min(float(length), shortest.get((i, j), float(length)))
    n = len(index)
    if not shortest:
        return sparse.csr_matrix((n, n))
    rows, cols = zip(*shortest)
    return sparse.csr_matrix((list(shortest.values()), (rows, cols)), shape=(n, n))


def graph(edges: Sequence[Edge], name: str = "graph") -> FiniteMetricMeasureSpace:
    """Shortest-path metric of a weighted undirected graph, unit masses.

    Parameters
    ----------
    edges : sequence of (str, str, float)
        Edge list with positive lengths. Node order is first appearance.

    Raises
    ------
    InvalidParameterError
        Empty edge list, self loop or non-positive length.
    DisconnectedGraphError
        The graph has more than one connected component.

    Examples
    --------
    >>> graph([("a", "b", 2.0)]).distance(0, 1)
    2.0
    """

    if not edges:
        raise InvalidParameterError("A graph space needs at least one edge.")
    ids: dict[str, int] = {}
    clean_edges = []
    for a, b, length in edges:
        a, b = str(a), str(b)
        if a == b:
            raise InvalidParameterError(f"Self loop at node '{a}' is not allowed.")
        length = validate_positive("edge length", float(length))
        for node in (a, b):
            ids.setdefault(node, len(ids))
        clean_edges.append((a, b, length))

    n = len(ids)
    weights = edge_weights(list(ids), clean_edges)
    n_components, _ = csgraph.connected_components(weights, directed=False)
    if n_components > 1:
        raise DisconnectedGraphError(
            f"Graph has {n_components} connected components; "
            "its shortest-path metric is undefined."
        )
    table = csgraph.shortest_path(weights, method="D", directed=False)
    table = np.minimum(table, table.T)
    return FiniteMetricMeasureSpace.from_table(
        ids=list(ids),
        table=table,
        mass=np.ones(n),
        metric="graph",
        edges=clean_edges,
        name=name,
    )


def geometric_graph(n: int, radius: float, seed: int = 0) -> FiniteMetricMeasureSpace:
    """Random geometric graph on n uniform points, edge length = Euclidean distance."""

    validate_count("n", n, minimum=2)
    validate_positive("radius", radius)
    coords = np.random.default_rng(seed).random((n, 2))
    distances = cdist(coords, coords)
    i, j = np.nonzero(np.triu(distances < radius, k=1))
    edges = [(str(a), str(b), float(distances[a, b])) for a, b in zip(i, j)]
    if not edges:
        raise DisconnectedGraphError(
            f"No pair of points is closer than radius {radius}; the graph is disconnected."
        )
    space = graph(edges, name=f"geometric_graph({n}, {radius}, {seed})")
    if space.n < n:
        raise DisconnectedGraphError(
            f"{n - space.n} isolated points; the graph is disconnected."
        )
    order = [int(point_id) for point_id in space.ids]
    return FiniteMetricMeasureSpace.from_table(
        ids=space.ids,
        table=space.dist,
        mass=space.mass,
        coords=coords[order],
        metric="graph",
        edges=space.edges,
        name=space.name,
    )


available_generators: dict[str, Callable[..., FiniteMetricMeasureSpace]] = sort_dict_by_keys(
    {
        "circle": circle,
        "cloud": cloud,
        "geometric_graph": geometric_graph,
        "graph": graph,
        "grid2d": grid2d,
        "interval": interval,
        "koch": koch,
    }
)


def _lookup_generator(name: str) -> Callable[..., FiniteMetricMeasureSpace]:
    try:
        return available_generators[name]
    except KeyError as unknown_name:
        raise ConfigurationError(
            f"Unknown space generator '{name}'; "
            f"choose from {', '.join(available_generators)}."
        ) from unknown_name


def generate_space(name: str, **params: Any) -> FiniteMetricMeasureSpace:
    """Build a space from a generator name and its parameters.

    Raises
    ------
    ConfigurationError
        Unknown generator name.
    InvalidParameterError
        Parameters out of range (n < 2, level < 0, ...).
    DisconnectedGraphError
        Graph generators whose graph falls apart.
    """

    return _lookup_generator(name)(**params)


def _parse_argument(text: str) -> Any:
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError as bad_value:
        raise ConfigurationError(f"Cannot parse spec argument '{text}'.") from bad_value


def parse_spec(text: str) -> tuple[str, list[Any]]:
    """Split ``"name(a, b)"`` into its name and numeric arguments.

    Examples
    --------
    >>> parse_spec("geometric_graph(50, 0.3, 1)")
    ('geometric_graph', [50, 0.3, 1])
    """

    match = _SPEC_PATTERN.match(text)
    if match is None:
        raise ConfigurationError(f"Malformed spec '{text}'.")
    name, arguments = match.group(1), match.group(2)
    if not arguments or not arguments.strip():
        return name, []
    return name, [_parse_argument(argument) for argument in arguments.split(",")]


def resolve_space(spec: str) -> FiniteMetricMeasureSpace:
    """Build a space from a generator spec, or load it when spec is a file."""

    if os.path.isfile(spec):
        from .io import load_space

        return load_space(spec)
    name, arguments = parse_spec(spec)
    if name == "graph":
        raise ConfigurationError("Graph spaces are given as space files, not specs.")
    generator = _lookup_generator(name)
    try:
        return generator(*arguments)
    except TypeError as bad_arguments:
        raise ConfigurationError(
            f"Bad arguments for '{name}': {bad_arguments}"
        ) from bad_arguments
