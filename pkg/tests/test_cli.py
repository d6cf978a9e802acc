import json
import os

import pytest

from metric_sobolev import cli
from metric_sobolev.exceptions import ConvergenceError


def test_energy_ladder_exit_ok(tmp_path, capsys):
    status = cli.main(
        [
            '--experiment', 'energy-ladder',
            '--space', 'interval(100)',
            '--deltas', '0.2,0.1',
            '--out', str(tmp_path),
        ]
    )
    assert status == cli.EXIT_OK
    assert os.path.isfile(tmp_path / 'energy-ladder.json')
    assert '[energy-ladder] Running energy-ladder...' in capsys.readouterr().err


def test_failed_check_exit(tmp_path, capsys):
    status = cli.main(
        ['--experiment', 'snowflake-demo', '--space', 'interval(1000)', '--out', str(tmp_path)]
    )
    assert status == cli.EXIT_CHECK_FAILED
    assert 'FAILED snowflake-demo: dimension_fit' in capsys.readouterr().err


def test_malformed_space_file(tmp_path, space_file, capsys):
    path = space_file({'points': 'none', 'metric': 'euclidean'})
    status = cli.main(
        ['--experiment', 'partition-audit', '--space', path, '--out', str(tmp_path)]
    )
    assert status == cli.EXIT_CONFIG_ERROR
    assert 'metric-sobolev: error:' in capsys.readouterr().err


@pytest.mark.parametrize(
    'flags',
    [
        ['--experiment', 'flow-run', '--space', 'interval(20)', '--q', '0.5'],
        ['--experiment', 'flow-run', '--space', 'interval(20)', '--deltas', 'x'],
        ['--experiment', 'flow-run'],
        ['--experiment', 'flow-run', '--space', 'interval(1)'],
        ['--experiment', 'flow-run', '--space', 'spiral(20)'],
    ],
)
def test_bad_configuration_exit(tmp_path, flags):
    assert cli.main(flags + ['--out', str(tmp_path)]) == cli.EXIT_CONFIG_ERROR


def test_unknown_experiment_is_a_usage_error():
    with pytest.raises(SystemExit) as raised:
        cli.main(['--experiment', 'nothing', '--space', 'interval(10)'])
    assert raised.value.code == 2


def test_manifest(tmp_path):
    manifest = tmp_path / 'manifest.json'
    manifest.write_text(
        json.dumps(
            [
                {'experiment': 'flow-run', 'space': 'interval(30)', 'steps': 2,
                 'out': str(tmp_path / 'runs')},
                {'experiment': 'partition-audit', 'space': 'interval(30)', 'deltas': [0.2],
                 'format': 'csv', 'out': str(tmp_path / 'runs')},
            ]
        ),
        encoding='utf-8',
    )
    assert cli.main(['--manifest', str(manifest)]) == cli.EXIT_OK
    outputs = sorted(os.listdir(tmp_path / 'runs'))
    assert 'flow-run.json' in outputs
    assert 'partition-audit_checks.csv' in outputs


def test_manifest_with_unknown_experiment(tmp_path):
    manifest = tmp_path / 'manifest.json'
    manifest.write_text(
        json.dumps([{'experiment': 'nothing', 'space': 'interval(10)'}]), encoding='utf-8'
    )
    assert cli.main(['--manifest', str(manifest)]) == cli.EXIT_CONFIG_ERROR


def test_run_error_exit(tmp_path, monkeypatch, capsys):
    def stuck(*args, **kwargs):
        raise ConvergenceError('stuck', residual=1.0)

    monkeypatch.setattr('metric_sobolev.experiments.flow_run.run_flow', stuck)
    status = cli.main(
        ['--experiment', 'flow-run', '--space', 'interval(20)', '--out', str(tmp_path)]
    )
    assert status == cli.EXIT_RUN_ERROR
    err = capsys.readouterr().err
    assert 'metric-sobolev: ConvergenceError: stuck' in err
    assert 'Traceback' not in err


@pytest.mark.parametrize('q', ['1.2', '1.5', '1.8'])
@pytest.mark.parametrize('tau', ['0.01', '1', '100'])
def test_flow_below_quadratic_exit_ok(tmp_path, q, tau):
    status = cli.main(
        [
            '--experiment', 'flow-run',
            '--space', 'interval(200)',
            '--q', q,
            '--tau', tau,
            '--out', str(tmp_path),
        ]
    )
    assert status == cli.EXIT_OK


def test_skip_warnings_go_to_status_lines(tmp_path, capsys, recwarn):
    status = cli.main(
        ['--experiment', 'wug-audit', '--space', 'grid2d(20)', '--out', str(tmp_path)]
    )
    assert status == cli.EXIT_OK
    assert '[wug-audit] Warning: ' in capsys.readouterr().err
    assert not [w for w in recwarn if issubclass(w.category, UserWarning)]
