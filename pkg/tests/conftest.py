import json

import numpy as np
import pytest

from metric_sobolev import generators
from metric_sobolev.partition import build_partition, neighbor_graph
from metric_sobolev.space import FiniteMetricMeasureSpace


@pytest.fixture
def line3():
    return generators.interval(3)


@pytest.fixture
def line3_cells(line3):
    partition = build_partition(line3, 0.6, 0.075)
    return partition, neighbor_graph(line3, partition)


@pytest.fixture
def two_cell_space():
    coords = np.array([[0.0, 0.0], [0.4, 0.0], [1.1, 0.0], [1.5, 0.0]])
    return FiniteMetricMeasureSpace.from_coordinates(
        coords, mass=np.full(4, 0.5), name='two-cells'
    )


@pytest.fixture
def two_cells(two_cell_space):
    partition = build_partition(two_cell_space, 1.0)
    return partition, neighbor_graph(two_cell_space, partition)


@pytest.fixture
def interval101():
    return generators.interval(101)


@pytest.fixture
def grid8():
    return generators.grid2d(8)


@pytest.fixture
def path_graph():
    return generators.graph(
        [('a', 'b', 1.0), ('b', 'c', 2.0), ('c', 'd', 1.0)], name='path'
    )


@pytest.fixture
def rng():
    return np.random.default_rng(11)


@pytest.fixture
def space_file(tmp_path):
    def write(content, name='space.json'):
        path = tmp_path / name
        path.write_text(json.dumps(content), encoding='utf-8')
        return str(path)

    return write
