import math

import numpy as np
import pytest

from metric_sobolev import energy, generators
from metric_sobolev.exceptions import EmptyCellError, InvalidParameterError, MismatchError
from metric_sobolev.fields import build_field, reference_energy
from metric_sobolev.partition import build_partition, neighbor_graph
from metric_sobolev.space import FiniteMetricMeasureSpace

LINE = [0.0, 0.5, 1.0]


def cloud_cells(seed=0, delta=0.2):
    space = generators.cloud(60, seed)
    partition = build_partition(space, delta)
    return space, partition, neighbor_graph(space, partition)


def test_project_cells(line3, line3_cells):
    partition, _ = line3_cells
    projected = energy.project_cells(line3, partition, LINE)
    np.testing.assert_allclose(projected.values, [0.25, 1.0])
    assert projected.partition_id == partition.partition_id


def test_project_cells_empty_cell():
    space = FiniteMetricMeasureSpace.from_table(
        ids=('a', 'b'), table=np.array([[0.0, 1.0], [1.0, 0.0]]), mass=np.array([1.0, 0.0])
    )
    partition = build_partition(space, 0.5)
    with pytest.raises(EmptyCellError) as empty:
        energy.project_cells(space, partition, [1.0, 2.0])
    assert empty.value.cell == 1


def test_energy_line(line3, line3_cells):
    partition, graph = line3_cells
    assert energy.energy_Fq(line3, partition, graph, LINE, 2) == pytest.approx(1.5625)
    assert energy.energy_sup(line3, partition, graph, LINE, 2) == pytest.approx(1.5625)
    gradient = energy.discrete_gradient_field(line3, partition, graph, LINE, 2)
    np.testing.assert_allclose(gradient.values, [1.25, 1.25])


def test_energy_homogeneity_and_constant_invariance(line3, line3_cells):
    partition, graph = line3_cells
    u = np.array(LINE)
    base = energy.energy_Fq(line3, partition, graph, u, 3)
    assert energy.energy_Fq(line3, partition, graph, 2 * u, 3) == pytest.approx(8 * base)
    assert energy.energy_Fq(line3, partition, graph, u + 5, 3) == pytest.approx(base)


def test_sobolev_norm_and_embedding(line3, line3_cells):
    partition, graph = line3_cells
    norm = energy.sobolev_norm_N(line3, partition, graph, LINE, 2)
    assert norm == pytest.approx(math.sqrt(0.375 + 1.5625))
    embedded = energy.phi_embedding(line3, partition, graph, LINE, 2)
    assert embedded.size == 2 + 2
    assert np.linalg.norm(embedded) == pytest.approx(norm, rel=1e-12)


def test_energy_rejects_bad_exponent(line3, line3_cells):
    partition, graph = line3_cells
    with pytest.raises(InvalidParameterError):
        energy.energy_Fq(line3, partition, graph, LINE, 1.0)


def test_energy_rejects_foreign_field(line3, line3_cells, interval101):
    partition, graph = line3_cells
    with pytest.raises(MismatchError):
        energy.energy_Fq(line3, partition, graph, interval101.scalar_field(np.zeros(101)), 2)


def test_cell_values_checks_partition(line3, line3_cells):
    partition, _ = line3_cells
    other = build_partition(line3, 0.8)
    field = energy.project_cells(line3, other, LINE)
    with pytest.raises(MismatchError):
        energy.cell_values(partition, field)


@pytest.mark.parametrize('q', [1.5, 2.0, 3.0])
def test_projection_contracts(q, rng):
    space, partition, _ = cloud_cells(seed=3)
    for _ in range(20):
        u = rng.standard_normal(space.n)
        projected = energy.project_cells(space, partition, u).values
        cell_norm = partition.cell_mass @ np.abs(projected) ** q
        assert cell_norm <= (space.mass @ np.abs(u) ** q) * (1 + 1e-12)


@pytest.mark.parametrize('q', [1.5, 2.0, 3.0])
def test_sup_energy_dominated(q, rng):
    space, partition, graph = cloud_cells(seed=1)
    u = rng.standard_normal(space.n)
    assert energy.energy_sup(space, partition, graph, u, q) <= energy.energy_Fq(
        space, partition, graph, u, q
    ) * (1 + 1e-12)


@pytest.mark.parametrize('q', [1.5, 2.0, 3.0])
def test_clarkson_residual_nonnegative(q, rng):
    space, partition, graph = cloud_cells(seed=2)
    for _ in range(20):
        u, v = rng.standard_normal(space.n), rng.standard_normal(space.n)
        residual = energy.clarkson_residual(space, partition, graph, u, v, q)
        assert residual.inequality >= -1e-10 * residual.scale
        slack = energy.uniform_convexity_slack(space, partition, graph, u, v, q)
        assert slack >= -1e-9


def test_parallelogram_identity(rng):
    space, partition, graph = cloud_cells(seed=4)
    u, v = rng.standard_normal(space.n), rng.standard_normal(space.n)
    residual = energy.clarkson_residual(space, partition, graph, u, v, 2.0)
    assert abs(residual.identity) <= 1e-9 * residual.identity_scale


def test_clarkson_identity_only_for_quadratic(rng):
    space, partition, graph = cloud_cells(seed=4)
    u, v = rng.standard_normal(space.n), rng.standard_normal(space.n)
    residual = energy.clarkson_residual(space, partition, graph, u, v, 3.0)
    assert residual.identity is None


def test_convexity_modulus():
    assert energy.convexity_modulus(0.0, 3.0) == 0.0
    assert energy.convexity_modulus(2.0, 2.0) == pytest.approx(1.0)
    assert energy.convexity_modulus(1.0, 2.0) == pytest.approx(1 - math.sqrt(0.75))
    assert 0 < energy.convexity_modulus(1.0, 1.5) < 1


def test_uniform_convexity_needs_nonzero_norm(line3, line3_cells):
    partition, graph = line3_cells
    with pytest.raises(InvalidParameterError):
        energy.uniform_convexity_slack(line3, partition, graph, [0.0] * 3, LINE, 2)


def test_sandwich_bracket():
    assert energy.sandwich_bracket(2, 3) == pytest.approx((1 / 16, 36 * 27))
    assert energy.sandwich_bracket(2, 3, 'sup') == pytest.approx((1 / 36, 36))


@pytest.mark.parametrize('q', [1.5, 2.0, 3.0])
def test_energy_ladder_sandwich(q):
    space = generators.interval(500)
    u = build_field(space, 'sin')
    ladder = energy.energy_ladder(
        space, u, q, [0.2, 0.1, 0.05, 0.02], reference_energy=reference_energy('sin', q)
    )
    assert ladder.passed, ladder.failures()
    assert ladder.deltas == [0.2, 0.1, 0.05, 0.02]
    frame = ladder.to_frame()
    assert frame['delta'].tolist() == ladder.deltas
    assert (frame['ratio'] > 0).all()


def test_energy_ladder_sup_variant(interval101):
    u = build_field(interval101, 'linear')
    ladder = energy.energy_ladder(
        interval101, u, 2.0, [0.2, 0.1], reference_energy=1.0, variant='sup'
    )
    assert ladder.passed, ladder.failures()
    assert ladder.values['upper_bound'] == pytest.approx(36 * 1.1)


def test_energy_ladder_sorts_unsorted_deltas(interval101):
    u = build_field(interval101, 'linear')
    with pytest.warns(UserWarning, match='not strictly decreasing'):
        ladder = energy.energy_ladder(interval101, u, 2.0, [0.1, 0.2, 0.1])
    assert ladder.deltas == [0.2, 0.1]
    assert 'sandwich_lower' not in ladder.checks


def test_energy_ladder_warns_below_resolution(interval101):
    u = build_field(interval101, 'linear')
    with pytest.warns(UserWarning, match='sample resolution'):
        ladder = energy.energy_ladder(interval101, u, 2.0, [0.1, 0.005])
    assert ladder.tables['ladder']['isolated_cell_fraction'].iloc[-1] == 1.0
    assert ladder.energies[-1] == 0.0


@pytest.mark.parametrize('deltas, variant', [([], 'sum'), ([0.1], 'max')])
def test_energy_ladder_rejects_input(interval101, deltas, variant):
    with pytest.raises(InvalidParameterError):
        energy.energy_ladder(interval101, np.zeros(101), 2.0, deltas, variant=variant)


def test_lipschitz_energy_bound(interval101):
    partition = build_partition(interval101, 0.1)
    graph = neighbor_graph(interval101, partition)
    u = build_field(interval101, 'sin')
    report = energy.lipschitz_energy_bound(interval101, partition, graph, u, 2.0)
    assert report.passed, report.failures()
    assert report.values['spread'] == pytest.approx(6.25)
    assert report.values['uniform_bound_holds']
