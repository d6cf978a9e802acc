import json

import numpy as np
import pytest

from metric_sobolev import generators, io
from metric_sobolev.exceptions import (
    DisconnectedGraphError,
    InvalidParameterError,
    MetricViolationError,
    SpaceFormatError,
)
from metric_sobolev.partition import build_partition, neighbor_graph
from metric_sobolev.slopes import monotone_paths


def table_content(table):
    return {
        'points': [{'id': point_id, 'mass': 1.0} for point_id in 'abc'],
        'metric': {'table': table},
    }


def test_euclidean_round_trip(interval101, tmp_path):
    path = io.save_space(interval101, tmp_path / 'interval.json')
    loaded = io.load_space(path)
    assert loaded.metric == 'euclidean'
    assert loaded.space_id == interval101.space_id
    np.testing.assert_array_equal(loaded.dist, interval101.dist)


def test_graph_round_trip(path_graph, tmp_path):
    loaded = io.load_space(io.save_space(path_graph, tmp_path / 'graph.json'))
    assert loaded.metric == 'graph'
    assert loaded.ids == path_graph.ids
    np.testing.assert_array_equal(loaded.dist, path_graph.dist)


def test_table_round_trip(tmp_path):
    space = generators.circle(5)
    loaded = io.load_space(io.save_space(space, tmp_path / 'circle.json'))
    np.testing.assert_array_equal(loaded.dist, space.dist)
    np.testing.assert_array_equal(loaded.mass, space.mass)


def test_saved_space_is_deterministic(grid8, tmp_path):
    first = io.save_space(grid8, tmp_path / 'first.json')
    second = io.save_space(grid8, tmp_path / 'second.json')
    with open(first, 'rb') as a, open(second, 'rb') as b:
        assert a.read() == b.read()


def test_load_space_invalid_json(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{"points": [', encoding='utf-8')
    with pytest.raises(SpaceFormatError, match='not valid JSON'):
        io.load_space(path)


def test_load_space_missing_file(tmp_path):
    with pytest.raises(SpaceFormatError, match='does not exist'):
        io.load_space(tmp_path / 'missing.json')


@pytest.mark.parametrize(
    'content',
    [
        {'metric': 'euclidean'},
        {'points': [], 'metric': 'euclidean'},
        {'points': [{'id': 'a'}], 'metric': 'euclidean'},
        {'points': [{'id': 'a', 'mass': 1.0}], 'metric': 'euclidean'},
        {'points': [{'id': 'a', 'mass': 1.0}], 'metric': 'manhattan'},
    ],
)
def test_load_space_malformed(space_file, content):
    with pytest.raises(SpaceFormatError):
        io.load_space(space_file(content))


def test_load_space_triangle_violation(space_file):
    path = space_file(table_content([[0, 1, 3], [1, 0, 1], [3, 1, 0]]))
    with pytest.raises(MetricViolationError) as violation:
        io.load_space(path)
    assert violation.value.witness == ('a', 'c', 'b')


def test_load_space_asymmetric_table(space_file):
    path = space_file(table_content([[0, 1, 1], [2, 0, 1], [1, 1, 0]]))
    with pytest.raises(MetricViolationError, match='symmetric') as violation:
        io.load_space(path)
    assert violation.value.witness == ('a', 'b')


def test_load_space_graph_unknown_node(space_file):
    content = {
        'points': [{'id': 'a', 'mass': 1.0}, {'id': 'b', 'mass': 1.0}],
        'metric': 'graph',
        'edges': [['a', 'z', 1.0]],
    }
    with pytest.raises(SpaceFormatError, match='unknown points'):
        io.load_space(space_file(content))


def test_load_space_graph_isolated_point(space_file):
    content = {
        'points': [{'id': point_id, 'mass': 1.0} for point_id in 'abc'],
        'metric': 'graph',
        'edges': [['a', 'b', 1.0]],
    }
    with pytest.raises(DisconnectedGraphError):
        io.load_space(space_file(content))


def test_load_space_graph_keeps_file_order(space_file):
    content = {
        'points': [{'id': point_id, 'mass': 2.0} for point_id in 'cab'],
        'metric': 'graph',
        'edges': [['a', 'b', 1.0], ['b', 'c', 1.5]],
    }
    space = io.load_space(space_file(content))
    assert space.ids == ('c', 'a', 'b')
    assert space.distance(0, 1) == 2.5
    assert space.total_mass == 6.0


def test_curves_round_trip(interval101, tmp_path):
    curves = monotone_paths(interval101, 3, seed=2)
    path = io.save_curves(interval101, curves, tmp_path / 'curves.json')
    loaded = io.load_curves(interval101, path)
    assert [curve.vertices.tolist() for curve in loaded] == [
        curve.vertices.tolist() for curve in curves
    ]


def test_load_curves_unknown_point(line3, tmp_path):
    path = tmp_path / 'curves.json'
    path.write_text(json.dumps({'curves': [['0', '7']]}), encoding='utf-8')
    with pytest.raises(InvalidParameterError):
        io.load_curves(line3, path)


def test_load_curves_malformed(line3, tmp_path):
    path = tmp_path / 'curves.json'
    path.write_text(json.dumps([['0', '1']]), encoding='utf-8')
    with pytest.raises(SpaceFormatError, match='curves'):
        io.load_curves(line3, path)


def test_load_ball_grid(line3, tmp_path):
    path = tmp_path / 'balls.csv'
    path.write_text('point_id,radius\n1,0.5\n2,0.25\n', encoding='utf-8')
    assert io.load_ball_grid(line3, path) == [(1, 0.5), (2, 0.25)]


def test_load_ball_grid_missing_columns(line3, tmp_path):
    path = tmp_path / 'balls.csv'
    path.write_text('point,r\n1,0.5\n', encoding='utf-8')
    with pytest.raises(SpaceFormatError, match='point_id'):
        io.load_ball_grid(line3, path)


def test_save_partition(line3, tmp_path):
    partition = build_partition(line3, 0.6, 0.075)
    graph = neighbor_graph(line3, partition)
    path = io.save_partition(line3, partition, graph, tmp_path / 'cells.json')
    with open(path, encoding='utf-8') as saved:
        content = json.load(saved)
    assert content['cells'] == [
        {'center': '0', 'members': ['0', '1']},
        {'center': '2', 'members': ['2']},
    ]
    assert content['neighbors'] == [[0, 1]]
