import json
import os

import numpy as np
import pandas as pd
import pytest

from metric_sobolev.energy import energy_ladder
from metric_sobolev.report import Report
from metric_sobolev.utils import saving


@pytest.fixture
def small_report():
    report = Report(name='sample')
    report.record('bounded', True, worst=0.5, bound=1.0)
    report.values.update({'delta': 0.1, 'count': np.int64(3), 'scales': np.array([1.0, 0.5])})
    report.tables['rows'] = pd.DataFrame({'delta': [0.2, 0.1], 'F': [1.5, 1.25]})
    return report


def test_save_options_sorted():
    assert list(saving.save_options) == ['CSV', 'JSON']


@pytest.mark.parametrize(
    'value, text',
    [
        (0.1, '0.10000000000000001'),
        (2.0, '2.0'),
        (1e-20, '9.9999999999999995e-21'),
        (float('nan'), 'NaN'),
        (float('-inf'), '-Infinity'),
    ],
)
def test_format_float(value, text):
    assert saving.format_float(value) == text


def test_floats_reread_exactly():
    values = [0.1, 1 / 3, 2.0**-40, 123456.789]
    assert json.loads(saving.dumps(values)) == values


def test_dumps_sorts_keys():
    assert saving.dumps({'b': 1, 'a': [True, None, 'x']}) == '{"a": [true, null, "x"], "b": 1}'


def test_to_jsonable_converts_containers():
    frame = pd.DataFrame({'x': [1, 2]})
    converted = saving.to_jsonable(
        {'frame': frame, 'array': np.arange(2), 'scalar': np.float64(0.5), 'set': {3, 1}}
    )
    assert converted == {'frame': {'x': [1, 2]}, 'array': [0, 1], 'scalar': 0.5, 'set': [1, 3]}


def test_dumps_rejects_unknown_objects():
    with pytest.raises(TypeError):
        saving.dumps({'value': object()})


def test_save_results_type_error(tmp_path):
    with pytest.raises(TypeError):
        saving.save_results([pd.DataFrame()], tmp_path, 'csv')


def test_save_results_format_error(tmp_path):
    with pytest.raises(ValueError):
        saving.save_results({'table': pd.DataFrame()}, tmp_path, 'xlsx')


def test_save_results_writes_every_table(tmp_path):
    tables = {
        'run b': pd.DataFrame({'x': [1.0]}),
        'run_a': pd.DataFrame({'x': [0.1, 0.2]}),
    }
    paths = saving.save_results(tables, tmp_path / 'out', 'CSV')
    assert sorted(os.path.basename(path) for path in paths) == ['run_a.csv', 'run_b.csv']
    assert pd.read_csv(tmp_path / 'out' / 'run_a.csv')['x'].tolist() == [0.1, 0.2]


def test_save_dataframe_json(tmp_path):
    path = tmp_path / 'table.json'
    saving.save_dataframe(pd.DataFrame({'delta': [0.5]}), path, 'json')
    assert json.loads(path.read_text(encoding='utf-8')) == {'delta': [0.5]}


def test_save_dataframe_requires_frame(tmp_path):
    with pytest.raises(ValueError):
        saving.save_dataframe({'delta': [0.5]}, tmp_path / 'table.csv', 'csv')


def test_emit_report_is_deterministic(tmp_path, small_report):
    first = saving.emit_report(small_report, tmp_path / 'first.json')
    second = saving.emit_report(small_report, tmp_path / 'nested' / 'second.json')
    with open(first, 'rb') as a, open(second, 'rb') as b:
        assert a.read() == b.read()
    content = json.loads((tmp_path / 'first.json').read_text(encoding='utf-8'))
    assert content['passed'] is True
    assert content['values'] == {'count': 3, 'delta': 0.1, 'scales': [1.0, 0.5]}
    assert content['tables']['rows'] == {'delta': [0.2, 0.1], 'F': [1.5, 1.25]}


def test_emit_report_csv_holds_checks(tmp_path, small_report):
    path = saving.emit_report(small_report, tmp_path / 'checks.csv', 'csv')
    frame = pd.read_csv(path)
    assert frame['name'].tolist() == ['bounded']
    assert frame['worst'].tolist() == [0.5]


def test_emit_ladder_csv_has_one_row_per_delta(tmp_path, interval101):
    ladder = energy_ladder(interval101, interval101.coords[:, 0], 2, [0.2, 0.1, 0.05])
    path = saving.emit_report(ladder, tmp_path / 'ladder.csv', 'csv')
    frame = pd.read_csv(path)
    assert frame['delta'].tolist() == [0.2, 0.1, 0.05]
    assert list(frame.columns) == ['delta', 'F', 'ratio', 'isolated_cell_fraction']


def test_emit_report_format_error(tmp_path, small_report):
    with pytest.raises(ValueError):
        saving.emit_report(small_report, tmp_path / 'report.xml', 'xml')
