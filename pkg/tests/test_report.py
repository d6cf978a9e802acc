import math

import pandas as pd
import pytest

from metric_sobolev.report import Report, worst_or_zero


@pytest.fixture
def inner():
    report = Report(name='inner')
    report.record('bounded', False, worst=2.0, bound=1.0, detail='ratio too large')
    report.values['ratio'] = 2.0
    report.tables['rows'] = pd.DataFrame({'x': [1]})
    report.warnings.append('coarse scale')
    return report


def test_record_replaces_check():
    report = Report(name='outer')
    report.record('bounded', False, worst=2.0)
    report.record('bounded', True, worst=0.5)
    assert report.passed
    assert list(report.checks) == ['bounded']


def test_empty_report_passes():
    assert Report(name='empty').passed


def test_warn_records_and_emits():
    report = Report(name='outer')
    with pytest.warns(UserWarning, match='coarse'):
        report.warn('coarse scale')
    assert report.warnings == ['coarse scale']


def test_merge_with_checks(inner):
    outer = Report(name='outer')
    outer.merge(inner, prefix='delta=0.1')
    assert not outer.passed
    assert [check.name for check in outer.failures()] == ['delta=0.1.bounded']
    assert outer.checks['delta=0.1.bounded'].detail == 'ratio too large'
    assert outer.values == {'delta=0.1.ratio': 2.0}
    assert list(outer.tables) == ['delta=0.1.rows']
    assert outer.warnings == ['coarse scale']


def test_merge_without_checks(inner):
    outer = Report(name='outer')
    outer.merge(inner, include_checks=False)
    assert outer.passed
    assert not outer.checks
    assert outer.values['inner.bounded.passed'] is False
    assert outer.values['inner.bounded.worst'] == 2.0


def test_to_frame_and_dict(inner):
    frame = inner.to_frame()
    assert list(frame.columns) == ['name', 'passed', 'worst', 'bound', 'detail']
    assert frame['passed'].tolist() == [False]
    record = inner.to_dict()
    assert record['passed'] is False
    assert record['checks']['bounded']['bound'] == 1.0
    assert set(record) == {'name', 'passed', 'checks', 'values', 'tables', 'warnings'}


def test_worst_or_zero():
    assert worst_or_zero([]) == 0.0
    assert worst_or_zero([1.0, math.nan, 3.0]) == 3.0
    assert worst_or_zero([1.0, -2.0], reducer=min) == -2.0
