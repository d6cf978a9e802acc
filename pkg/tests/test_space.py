import numpy as np
import pytest

from metric_sobolev.exceptions import InvalidParameterError, MismatchError
from metric_sobolev.space import (
    TABLE_LIMIT,
    FiniteMetricMeasureSpace,
    ball_query,
    field_values,
    validate_metric,
)


def table_space(table, ids=('a', 'b', 'c')):
    return FiniteMetricMeasureSpace.from_table(
        ids=ids, table=np.array(table, dtype=float), mass=np.ones(len(ids))
    )


def test_interval_basic_properties(line3):
    assert line3.n == 3
    assert line3.distance(0, 2) == 1.0
    assert line3.total_mass == pytest.approx(1.0)
    assert line3.diameter == 1.0
    assert line3.min_positive_distance == 0.5


def test_index_of_accepts_ids_and_indices(line3):
    assert line3.index_of('1') == 1
    assert line3.index_of(2) == 2


@pytest.mark.parametrize('point', [5, -1, 'missing'])
def test_index_of_unknown_point(line3, point):
    with pytest.raises(InvalidParameterError):
        line3.index_of(point)


def test_ball_query_is_open(line3):
    ball = ball_query(line3, 1, 0.5)
    assert ball.members.tolist() == [1]
    assert ball.mass == pytest.approx(1 / 3)
    assert 0 not in ball


def test_ball_query_covers_space(line3):
    ball = ball_query(line3, '1', 0.6)
    assert ball.members.tolist() == [0, 1, 2]
    assert ball.mass == pytest.approx(1.0)


def test_ball_query_rejects_bad_radius(line3):
    with pytest.raises(InvalidParameterError):
        ball_query(line3, 0, 0.0)


def test_duplicate_ids_rejected():
    with pytest.raises(InvalidParameterError, match='unique'):
        table_space([[0, 1], [1, 0]], ids=('a', 'a'))


def test_negative_mass_rejected():
    with pytest.raises(InvalidParameterError, match='nonnegative'):
        FiniteMetricMeasureSpace.from_table(
            ids=('a', 'b'), table=np.array([[0.0, 1.0], [1.0, 0.0]]), mass=np.array([1.0, -1.0])
        )


def test_space_id_is_content_hash():
    first = table_space([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    second = table_space([[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    third = table_space([[0, 1, 1.5], [1, 0, 1], [1.5, 1, 0]])
    assert first.space_id == second.space_id
    assert first.space_id != third.space_id


def test_validate_metric_clean(line3):
    report = validate_metric(line3)
    assert report.passed
    assert report.values['exhaustive']


def test_validate_metric_triangle_witness():
    report = validate_metric(table_space([[0, 1, 3], [1, 0, 1], [3, 1, 0]]))
    assert not report.checks['triangle'].passed
    row = report.tables['triangle'].iloc[0]
    assert (row['a'], row['b'], row['via']) == ('a', 'c', 'b')
    assert row['excess'] == pytest.approx(1.0)


def test_validate_metric_symmetry_and_positivity():
    report = validate_metric(table_space([[0, 1, 1], [2, 0, 1], [1, 1, 0]]))
    assert not report.checks['symmetry'].passed
    report = validate_metric(table_space([[0, 0, 1], [0, 0, 1], [1, 1, 0]]))
    assert not report.checks['positivity'].passed


def test_scalar_field_arithmetic(line3):
    u = line3.scalar_field(np.array([0.0, 1.0, 2.0]))
    v = line3.scalar_field(np.array([1.0, 1.0, 1.0]))
    assert ((u + v) * 0.5).values.tolist() == [0.5, 1.0, 1.5]
    assert (-(u - v)).values.tolist() == [1.0, 0.0, -1.0]


def test_scalar_field_rejects_foreign_space(line3, interval101):
    u = line3.scalar_field(np.zeros(3))
    with pytest.raises(MismatchError):
        field_values(interval101, u)
    with pytest.raises(MismatchError):
        field_values(line3, np.zeros(4))


def test_scalar_field_rejects_non_finite(line3):
    with pytest.raises(InvalidParameterError):
        line3.scalar_field(np.array([0.0, np.nan, 1.0]))


def test_large_space_uses_oracle():
    n = TABLE_LIMIT + 1
    coords = np.column_stack([np.linspace(0.0, 1.0, n), np.zeros(n)])
    space = FiniteMetricMeasureSpace.from_coordinates(coords, mass=np.full(n, 1.0 / n))
    assert space.table is None
    assert space.distance(0, n - 1) == pytest.approx(1.0)
    assert space.distance_rows([0, 1]).shape == (2, n)
