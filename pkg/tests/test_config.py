import pytest

from metric_sobolev import config
from metric_sobolev.config import ExperimentConfig
from metric_sobolev.exceptions import ConfigurationError


def test_defaults():
    settings = ExperimentConfig(experiment='energy-ladder', space='interval(50)')
    assert settings.field == 'sin'
    assert settings.q == 2.0
    assert settings.deltas == ()
    assert settings.output_format == 'json'


def test_lists_from_strings():
    settings = ExperimentConfig(
        experiment='hopflax-suite',
        space='interval(50)',
        deltas='0.2,0.1',
        times='0.1, 0.5,1',
        output_format='CSV',
    )
    assert settings.deltas == (0.2, 0.1)
    assert settings.times == (0.1, 0.5, 1.0)
    assert settings.output_format == 'csv'


@pytest.mark.parametrize(
    'options',
    [
        {'space': 'interval(50'},
        {'field': 'parabola'},
        {'q': 1.0},
        {'p': '2'},
        {'tau': 0.0},
        {'lambda_': 0.5},
        {'radius': -1.0},
        {'seed': -1},
        {'steps': 1.5},
        {'pairs': 0},
        {'deltas': '0.1,-0.2'},
        {'deltas': 'a,b'},
        {'times': [0.5, 0.1]},
        {'output_format': 'xlsx'},
        {'curves': 'missing-curves.json'},
        {'balls': 'missing-balls.csv'},
    ],
)
def test_invalid_values(options):
    arguments = {'experiment': 'energy-ladder', 'space': 'interval(50)'}
    arguments.update(options)
    with pytest.raises(ConfigurationError):
        ExperimentConfig(**arguments)


def test_field_file_is_accepted(tmp_path):
    path = tmp_path / 'values.json'
    path.write_text('[1, 2]', encoding='utf-8')
    settings = ExperimentConfig(experiment='flow-run', space='interval(2)', field=str(path))
    assert settings.field == str(path)


def test_from_dict_aliases():
    settings = ExperimentConfig.from_dict(
        {
            'experiment': 'diagnostics-suite',
            'space': 'grid2d(6)',
            'format': 'csv',
            'lambda': 2.0,
            'deltas': [0.3, 0.15],
        }
    )
    assert settings.output_format == 'csv'
    assert settings.lambda_ == 2.0
    assert settings.deltas == (0.3, 0.15)


def test_from_dict_errors():
    with pytest.raises(ConfigurationError, match='Unknown configuration key'):
        ExperimentConfig.from_dict({'experiment': 'flow-run', 'space': 'interval(5)', 'x': 1})
    with pytest.raises(ConfigurationError, match='Incomplete'):
        ExperimentConfig.from_dict({'experiment': 'flow-run'})


@pytest.mark.parametrize('raw, threads', [('', 1), ('4', 4), ('zero', 1), ('-3', 1)])
def test_max_threads(monkeypatch, raw, threads):
    monkeypatch.setenv(config.THREADS_ENV_VAR, raw)
    assert config.max_threads() == threads
