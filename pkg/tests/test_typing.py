from metric_sobolev import _typing


def test_only_used_aliases_are_defined():
    for name in ('TableDict', 'CellIndex', 'PointId'):
        assert not hasattr(_typing, name)
    assert _typing.BallGrid == list[_typing.BallSample]
    assert _typing.Edge == tuple[str, str, float]
