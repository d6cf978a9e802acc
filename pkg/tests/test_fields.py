import json
import math

import numpy as np
import pytest

from metric_sobolev.exceptions import ConfigurationError, InvalidParameterError, SpaceFormatError
from metric_sobolev.fields import build_field, first_coordinate, reference_energy
from metric_sobolev.slopes import lipschitz_constant


def test_analytic_fields(line3):
    assert build_field(line3, 'constant(2.5)').values.tolist() == [2.5, 2.5, 2.5]
    assert build_field(line3, 'constant').values.tolist() == [1.0, 1.0, 1.0]
    assert build_field(line3, 'linear').values.tolist() == [0.0, 0.5, 1.0]
    assert build_field(line3, 'abs-kink').values.tolist() == [0.5, 0.0, 0.5]
    assert build_field(line3, 'indicator').values.tolist() == [1.0, 1.0, 0.0]
    assert build_field(line3, 'sin').values == pytest.approx([0.0, 0.0, 0.0], abs=1e-12)


def test_fields_belong_to_their_space(line3):
    assert build_field(line3, 'linear').space_id == line3.space_id


def test_random_field_is_lipschitz(interval101):
    field = build_field(interval101, 'random(2)', seed=4)
    assert lipschitz_constant(interval101, field) <= 2.0 + 1e-12
    again = build_field(interval101, 'random(2)', seed=4)
    other = build_field(interval101, 'random(2)', seed=5)
    assert np.array_equal(field.values, again.values)
    assert not np.array_equal(field.values, other.values)


def test_first_coordinate_without_coordinates(path_graph):
    assert first_coordinate(path_graph).tolist() == [0.0, 0.25, 0.75, 1.0]


def test_field_from_file(line3, tmp_path):
    path = tmp_path / 'field.json'
    path.write_text(json.dumps([3.0, 1.0, 2.0]), encoding='utf-8')
    assert build_field(line3, str(path)).values.tolist() == [3.0, 1.0, 2.0]


@pytest.mark.parametrize('content', ['[1.0, 2.0]', '{"values": [1, 2, 3]}', '[1, 2,'])
def test_bad_field_file(line3, tmp_path, content):
    path = tmp_path / 'field.json'
    path.write_text(content, encoding='utf-8')
    with pytest.raises(SpaceFormatError):
        build_field(line3, str(path))


@pytest.mark.parametrize('spec', ['parabola', 'sin(', 'constant(x)'])
def test_unknown_field(line3, spec):
    with pytest.raises(ConfigurationError):
        build_field(line3, spec)


def test_random_field_needs_positive_constant(line3):
    with pytest.raises(InvalidParameterError):
        build_field(line3, 'random(-1)')


def test_reference_energy(tmp_path):
    assert reference_energy('sin', 2) == pytest.approx(2 * math.pi**2)
    assert reference_energy('sin', 4) == pytest.approx((2 * math.pi) ** 4 * 3 / 8)
    assert reference_energy('linear', 3) == 1.0
    assert reference_energy('abs-kink', 1.5) == 1.0
    assert reference_energy('constant(4)', 2) == 0.0
    assert reference_energy('indicator', 2) is None
    assert reference_energy('random(1)', 2) is None
    path = tmp_path / 'field.json'
    path.write_text('[0]', encoding='utf-8')
    assert reference_energy(str(path), 2) is None
