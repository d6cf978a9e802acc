import math

import numpy as np
import pytest

from metric_sobolev import generators
from metric_sobolev.exceptions import (
    ConfigurationError,
    DisconnectedGraphError,
    InvalidParameterError,
)
from metric_sobolev.space import validate_metric


def test_available_generators_sorted():
    names = list(generators.available_generators)
    assert names == sorted(names)
    assert 'koch' in names and 'interval' in names


def test_interval_rejects_single_point():
    with pytest.raises(InvalidParameterError):
        generators.interval(1)


def test_grid2d_ids_and_distances():
    space = generators.grid2d(3)
    assert space.n == 9
    assert space.ids[:3] == ('0,0', '0,1', '0,2')
    a, b = space.index_of('0,0'), space.index_of('2,2')
    assert space.distance(a, b) == pytest.approx(math.sqrt(2))
    assert space.total_mass == pytest.approx(1.0)


def test_circle_uses_arc_length():
    space = generators.circle(4)
    assert space.distance(0, 2) == pytest.approx(0.5)
    assert space.distance(0, 3) == pytest.approx(0.25)
    assert validate_metric(space).passed


def test_koch_level_one():
    space = generators.koch(1)
    assert space.n == 5
    assert space.distance(0, 4) == pytest.approx(1.0)
    for k in range(4):
        assert space.distance(k, k + 1) == pytest.approx(1 / 3)
    np.testing.assert_allclose(space.coords[2], [0.5, math.sqrt(3) / 6])


def test_koch_vertex_count():
    assert generators.koch_vertices(3).shape == (4**3 + 1, 2)
    assert generators.koch(0).n == 2


def test_graph_shortest_path(path_graph):
    assert path_graph.metric == 'graph'
    assert path_graph.distance(path_graph.index_of('a'), path_graph.index_of('d')) == 4.0
    assert path_graph.total_mass == 4.0


def test_graph_parallel_edges_keep_shortest():
    space = generators.graph([('a', 'b', 2.0), ('b', 'a', 1.0)])
    assert space.distance(0, 1) == 1.0


def test_graph_disconnected():
    with pytest.raises(DisconnectedGraphError, match='components'):
        generators.graph([('a', 'b', 1.0), ('c', 'd', 1.0)])


@pytest.mark.parametrize('edges', [[('a', 'a', 1.0)], [('a', 'b', 0.0)], []])
def test_graph_invalid_edges(edges):
    with pytest.raises(InvalidParameterError):
        generators.graph(edges)


def test_geometric_graph_metric():
    space = generators.geometric_graph(30, 0.8, 1)
    assert space.n == 30
    assert space.metric == 'graph'
    assert validate_metric(space).passed
    straight = np.linalg.norm(space.coords[:, None, :] - space.coords[None, :, :], axis=-1)
    assert np.all(space.dist >= straight - 1e-12)


def test_geometric_graph_disconnected():
    with pytest.raises(DisconnectedGraphError):
        generators.geometric_graph(5, 0.01, 0)


def test_cloud_is_seeded():
    assert generators.cloud(10, 3).space_id == generators.cloud(10, 3).space_id
    assert generators.cloud(10, 3).space_id != generators.cloud(10, 4).space_id


def test_parse_spec():
    assert generators.parse_spec('interval(5)') == ('interval', [5])
    assert generators.parse_spec('sin') == ('sin', [])
    assert generators.parse_spec('random(2.5)') == ('random', [2.5])


@pytest.mark.parametrize('spec', ['bad spec!', 'interval(a)'])
def test_parse_spec_malformed(spec):
    with pytest.raises(ConfigurationError):
        generators.parse_spec(spec)


def test_generate_space():
    assert generators.generate_space('interval', n=4).n == 4
    with pytest.raises(ConfigurationError, match='Unknown space generator'):
        generators.generate_space('sphere', n=4)


@pytest.mark.parametrize('spec', ['nope(3)', 'graph(1)', 'interval(2.5)', 'interval(1, 2, 3)'])
def test_resolve_space_configuration_errors(spec):
    with pytest.raises(ConfigurationError):
        generators.resolve_space(spec)


def test_resolve_space_parameter_error():
    with pytest.raises(InvalidParameterError):
        generators.resolve_space('interval(0)')


def test_resolve_space_spec():
    space = generators.resolve_space('grid2d(4)')
    assert space.name == 'grid2d(4)'
    assert space.n == 16
