"""
Cell projections, discrete gradients and discrete Sobolev energies.

All functionals are evaluated on the cell values u_i of the projection
P_delta u; |D_delta u| is stored as the q-th root so the same cell field
feeds both the energies and the curve checks in :mod:`metric_sobolev.slopes`.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd

from ._typing import FloatArray
from .diagnostics import default_ball_grid, doubling_constants
from .exceptions import EmptyCellError, InvalidParameterError, MismatchError
from .partition import (
    NeighborGraph,
    Partition,
    build_partition,
    check_graph,
    check_partition,
    neighbor_graph,
)
from .report import Report
from .space import FiniteMetricMeasureSpace, field_values
from .utils.validating import (
    is_strictly_decreasing,
    validate_exponent,
    validate_positive,
)


@dataclass(frozen=True, eq=False)
class CellField:
    """One finite value per cell of a partition."""

    values: FloatArray
    partition_id: str

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or not np.all(np.isfinite(values)):
            raise InvalidParameterError("Cell values must be a finite 1-D array.")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


def cell_values(partition: Partition, u) -> FloatArray:
    """Values of a CellField (checked against partition) or a raw array."""

    if isinstance(u, CellField):
        if u.partition_id != partition.partition_id:
            raise MismatchError(
                f"Cell field belongs to partition '{u.partition_id}', "
                f"not '{partition.partition_id}'."
            )
        return u.values
    values = np.asarray(u, dtype=float)
    if values.shape != (partition.n_cells,):
        raise MismatchError(
            f"Expected {partition.n_cells} cell values, not shape {values.shape}."
        )
    return values


def project_cells(space: FiniteMetricMeasureSpace, partition: Partition, u) -> CellField:
    """Mass-weighted mean of u over every cell.

    Raises
    ------
    EmptyCellError
        A cell has total mass zero.
    MismatchError
        u or partition belong to another space.

    Examples
    --------
    >>> from metric_sobolev.generators import interval
    >>> space = interval(3)
    >>> cells = build_partition(space, 0.6, 0.075)
    >>> project_cells(space, cells, [0.0, 0.5, 1.0]).values.round(12).tolist()
    [0.25, 1.0]
    """

    check_partition(space, partition)
    values = field_values(space, u)
    empty = np.flatnonzero(partition.cell_mass <= 0)
    if empty.size:
        raise EmptyCellError(int(empty[0]))
    sums = np.bincount(
        partition.labels, weights=space.mass * values, minlength=partition.n_cells
    )
    return CellField(values=sums / partition.cell_mass, partition_id=partition.partition_id)


def _pair_arrays(graph: NeighborGraph) -> tuple[np.ndarray, np.ndarray]:
    if not graph.pairs:
        empty = np.empty(0, dtype=np.intp)
        return empty, empty
    i, j = np.array(graph.pairs, dtype=np.intp).T
    return i, j


def gradient_power(values: FloatArray, graph: NeighborGraph, delta: float, q: float) -> FloatArray:
    """Per-cell sum (1/delta^q) sum_{j ~ i} |v_i - v_j|^q."""

    i, j = _pair_arrays(graph)
    n = graph.n_cells
    if i.size == 0:
        return np.zeros(n)
    jumps = np.abs(values[i] - values[j]) ** q
    total = np.bincount(i, weights=jumps, minlength=n) + np.bincount(j, weights=jumps, minlength=n)
    return total / delta**q


def sup_gradient(values: FloatArray, graph: NeighborGraph, delta: float) -> FloatArray:
    """Per-cell (1/delta) max_{j ~ i} |v_i - v_j|, zero on isolated cells."""

    i, j = _pair_arrays(graph)
    largest = np.zeros(graph.n_cells)
    if i.size:
        jumps = np.abs(values[i] - values[j])
        np.maximum.at(largest, i, jumps)
        np.maximum.at(largest, j, jumps)
    return largest / delta


def cell_energy(
    values: FloatArray, partition: Partition, graph: NeighborGraph, q: float
) -> float:
    """F_{delta,q} evaluated directly on cell values."""

    return float(partition.cell_mass @ gradient_power(values, graph, partition.delta, q))


def cell_norm(values: FloatArray, partition: Partition, graph: NeighborGraph, q: float) -> float:
    """N_delta evaluated directly on cell values."""

    mass_part = float(partition.cell_mass @ np.abs(values) ** q)
    return (mass_part + cell_energy(values, partition, graph, q)) ** (1.0 / q)


def _prepare(space, partition, graph, u, q) -> FloatArray:
    validate_exponent("q", q)
    check_partition(space, partition)
    check_graph(partition, graph)
    return project_cells(space, partition, u).values


def discrete_gradient_field(
    space: FiniteMetricMeasureSpace,
    partition: Partition,
    graph: NeighborGraph,
    u,
    q: float,
) -> CellField:
    """|D_delta u| per cell, stored as the q-th root; isolated cells get 0."""

    values = _prepare(space, partition, graph, u, q)
    power = gradient_power(values, graph, partition.delta, q)
    return CellField(values=power ** (1.0 / q), partition_id=partition.partition_id)


def energy_Fq(
    space: FiniteMetricMeasureSpace,
    partition: Partition,
    graph: NeighborGraph,
    u,
    q: float,
) -> float:
    """Discrete energy F_{delta,q}(u) = sum_i m(A_i) |D_delta u|^q(i).

    Examples
    --------
    >>> from metric_sobolev.generators import interval
    >>> space = interval(3)
    >>> cells = build_partition(space, 0.6, 0.075)
    >>> graph = neighbor_graph(space, cells)
    >>> round(energy_Fq(space, cells, graph, [0.0, 0.5, 1.0], 2) * 3, 10)
    4.6875
    """

    values = _prepare(space, partition, graph, u, q)
    return cell_energy(values, partition, graph, q)


def energy_sup(
    space: FiniteMetricMeasureSpace,
    partition: Partition,
    graph: NeighborGraph,
    u,
    q: float,
) -> float:
    """Sup-variant energy sum_i m(A_i) ((1/delta) max_{j ~ i} |u_i - u_j|)^q."""

    values = _prepare(space, partition, graph, u, q)
    return float(partition.cell_mass @ sup_gradient(values, graph, partition.delta) ** q)


def sobolev_norm_N(
    space: FiniteMetricMeasureSpace,
    partition: Partition,
    graph: NeighborGraph,
    u,
    q: float,
) -> float:
    """N_delta(u) = (||P_delta u||_q^q + F_{delta,q}(u))^(1/q)."""

    values = _prepare(space, partition, graph, u, q)
    return cell_norm(values, partition, graph, q)


def phi_embedding(
    space: FiniteMetricMeasureSpace,
    partition: Partition,
    graph: NeighborGraph,
    u,
    q: float,
) -> FloatArray:
    """Linear embedding whose l^q norm is N_delta(u).

    The first n_cells entries are m(A_i)^(1/q) u_i; then, for every
    ordered neighbor pair (i, j) in lexicographic order (both
    orientations), m(A_i)^(1/q) (u_i - u_j) / delta.
    """

    values = _prepare(space, partition, graph, u, q)
    weights = partition.cell_mass ** (1.0 / q)
    ordered = graph.ordered_pairs
    i, j = ordered[:, 0], ordered[:, 1]
    jumps = weights[i] * (values[i] - values[j]) / partition.delta
    return np.concatenate([weights * values, jumps])


@dataclass
class ClarksonResidual:
    """Slack of the applicable Clarkson inequality.

    Attributes
    ----------
    inequality : float
        Right-hand side minus left-hand side; nonnegative up to roundoff.
    scale : float
        N^q(u) + N^q(v), for relative tolerances.
    identity : float or None
        For q = 2, F(u+v) + F(u-v) - 2F(u) - 2F(v).
    identity_scale : float or None
        For q = 2, 2F(u) + 2F(v).
    """

    inequality: float
    scale: float
    identity: Optional[float] = None
    identity_scale: Optional[float] = None


def clarkson_residual(
    space: FiniteMetricMeasureSpace,
    partition: Partition,
    graph: NeighborGraph,
    u,
    v,
    q: float,
) -> ClarksonResidual:
    """Residual of the Clarkson inequality for N_delta.

    For q >= 2:
    ``N^q((u+v)/2) + N^q((u-v)/2) <= (N^q(u) + N^q(v)) / 2``.
    For 1 < q < 2, with p = q/(q-1):
    ``N^p((u+v)/2) + N^p((u-v)/2) <= (N^q(u)/2 + N^q(v)/2)^(1/(q-1))``.
    For q = 2 the parallelogram identity of F is reported as well.
    """

    a = _prepare(space, partition, graph, u, q)
    b = project_cells(space, partition, v).values

    def norm(values):
        return cell_norm(values, partition, graph, q)

    norm_u, norm_v = norm(a), norm(b)
    scale = norm_u**q + norm_v**q
    half_sum, half_difference = norm((a + b) / 2), norm((a - b) / 2)
    if q >= 2:
        inequality = scale / 2 - (half_sum**q + half_difference**q)
    else:
        p = q / (q - 1)
        bound = (scale / 2) ** (1.0 / (q - 1))
        inequality = bound - (half_sum**p + half_difference**p)
        scale = max(scale, bound)

    result = ClarksonResidual(inequality=float(inequality), scale=float(scale))
    if q == 2:
        def energy(values):
            return cell_energy(values, partition, graph, 2.0)

        energy_u, energy_v = energy(a), energy(b)
        result.identity = energy(a + b) + energy(a - b) - 2 * energy_u - 2 * energy_v
        result.identity_scale = 2 * energy_u + 2 * energy_v
    return result


def convexity_modulus(r: float, q: float) -> float:
    """Modulus of uniform convexity of an L^q-type norm at distance r.

    q >= 2: 1 - (1 - r^q / 2^q)^(1/q); 1 < q < 2: 1 - (1 - (r/2)^p)^(1/p).
    """

    if q >= 2:
        return 1.0 - max(0.0, 1.0 - r**q / 2**q) ** (1.0 / q)
    p = q / (q - 1)
    return 1.0 - max(0.0, 1.0 - (r / 2) ** p) ** (1.0 / p)


def uniform_convexity_slack(
    space: FiniteMetricMeasureSpace,
    partition: Partition,
    graph: NeighborGraph,
    u,
    v,
    q: float,
) -> float:
    """1 - omega(N(u - v)) - N((u + v)/2) after scaling u, v to N = 1.

    Raises
    ------
    InvalidParameterError
        u or v has N_delta = 0.
    """

    a = _prepare(space, partition, graph, u, q)
    b = project_cells(space, partition, v).values
    norm_a, norm_b = cell_norm(a, partition, graph, q), cell_norm(b, partition, graph, q)
    if norm_a == 0 or norm_b == 0:
        raise InvalidParameterError("Uniform convexity needs fields with nonzero norm.")
    a, b = a / norm_a, b / norm_b
    distance = cell_norm(a - b, partition, graph, q)
    midpoint = cell_norm((a + b) / 2, partition, graph, q)
    return 1.0 - convexity_modulus(distance, q) - midpoint


@dataclass
class EnergyLadder(Report):
    """Energies F_delta(u) along a decreasing delta ladder.

    Attributes
    ----------
    deltas : list of float
        Strictly decreasing scales.
    energies : list of float
    reference_energy : float, optional
        Analytic Cheeger energy when known.
    """

    deltas: list[float] = field(default_factory=list)
    energies: list[float] = field(default_factory=list)
    reference_energy: Optional[float] = None

    def to_frame(self) -> pd.DataFrame:
        return self.tables["ladder"]


def sandwich_bracket(q: float, c_d: float, variant: str = "sum") -> tuple[float, float]:
    """Constants (lower, upper) bracketing F_delta / Ch_q."""

    if variant == "sup":
        return 6.0 ** (-q), 6.0**q
    return 4.0 ** (-q), 6.0**q * c_d**3


def energy_ladder(
    space: FiniteMetricMeasureSpace,
    u,
    q: float,
    deltas: Sequence[float],
    reference_energy: Optional[float] = None,
    variant: str = "sum",
    doubling=None,
    tol: float = 0.1,
) -> EnergyLadder:
    """Rebuild the partition at every delta and record F_delta(u).

    Parameters
    ----------
    space : FiniteMetricMeasureSpace
    u : ScalarField or array
    q : float
        Exponent > 1.
    deltas : sequence of float
        Decreasing scales. Unsorted input or scales at or below the
        smallest positive distance are accepted with a warning.
    reference_energy : float, optional
        When given, the ratios F_delta / reference are checked against
        the sandwich bracket widened by ``tol``.
    variant : {'sum', 'sup'}
        Energy F_{delta,q} or the sup-variant F_delta^inf.
    doubling : DoublingReport, optional
        Precomputed doubling constants (measured when omitted).
    tol : float, optional (default=0.1)

    Returns
    -------
    ladder : EnergyLadder

    Raises
    ------
    InvalidParameterError
        Empty ladder or unknown variant.
    """

    validate_exponent("q", q)
    if variant not in ("sum", "sup"):
        raise InvalidParameterError(f"variant must be 'sum' or 'sup', not '{variant}'.")
    if not len(deltas):
        raise InvalidParameterError("energy_ladder needs at least one delta.")
    deltas = [validate_positive("delta", float(delta)) for delta in deltas]

    ladder = EnergyLadder(name="energy_ladder", reference_energy=reference_energy)
    if not is_strictly_decreasing(deltas):
        ladder.warn("deltas were not strictly decreasing; sorted and deduplicated.")
        deltas = sorted(set(deltas), reverse=True)
    resolution = space.min_positive_distance
    for delta in deltas:
        if delta <= resolution:
            ladder.warn(
                f"delta={delta} is at or below the sample resolution {resolution}; "
                "every cell is a singleton."
            )

    values = field_values(space, u)
    rows = []
    for delta in deltas:
        partition = build_partition(space, delta)
        graph = neighbor_graph(space, partition)
        if variant == "sum":
            energy = energy_Fq(space, partition, graph, values, q)
        else:
            energy = energy_sup(space, partition, graph, values, q)
        isolated = float(np.mean(graph.degree == 0))
        if reference_energy:
            ratio = energy / reference_energy
        elif reference_energy == 0:
            ratio = 0.0 if energy == 0 else math.inf
        else:
            ratio = math.nan
        rows.append(
            {"delta": delta, "F": energy, "ratio": ratio, "isolated_cell_fraction": isolated}
        )

    ladder.deltas = deltas
    ladder.energies = [row["F"] for row in rows]
    ladder.tables["ladder"] = pd.DataFrame(
        rows, columns=["delta", "F", "ratio", "isolated_cell_fraction"]
    )
    ladder.values.update({"q": q, "variant": variant, "reference_energy": reference_energy})
    ladder.record(
        "nonnegative",
        all(energy >= 0 for energy in ladder.energies),
        worst=min(ladder.energies),
        bound=0.0,
    )

    if reference_energy:
        if variant == "sum":
            if doubling is None:
                doubling = doubling_constants(space, default_ball_grid(space))
            c_d = doubling.values["c_D_metric"]
            ladder.values["c_D_metric"] = c_d
        else:
            c_d = 1.0
        lower, upper = sandwich_bracket(q, c_d, variant)
        lower, upper = lower * (1 - tol), upper * (1 + tol)
        ratios = ladder.tables["ladder"]["ratio"]
        ladder.values.update({"lower_bound": lower, "upper_bound": upper})
        ladder.record(
            "sandwich_lower",
            bool((ratios >= lower).all()),
            worst=float(ratios.min()),
            bound=lower,
        )
        ladder.record(
            "sandwich_upper",
            bool((ratios <= upper).all()),
            worst=float(ratios.max()),
            bound=upper,
        )
    return ladder


def lipschitz_energy_bound(
    space: FiniteMetricMeasureSpace,
    partition: Partition,
    graph: NeighborGraph,
    u,
    q: float,
    doubling=None,
) -> Report:
    """Compare |D_delta u|^q with the local Lipschitz constant of u.

    Points of neighboring cells lie at most ``spread * delta`` apart, with
    ``spread = 2 (1 + eps/delta) + 4``, and all lie in B(z_i, 6 delta).
    Hence, cell by cell,
    ``|D_delta u|^q(i) <= deg(i) spread^q Lip(u, B(z_i, 6 delta))^q``.
    """

    from .diagnostics import default_ball_grid, doubling_constants
    from .slopes import ball_lipschitz

    values = _prepare(space, partition, graph, u, q)
    point_values = field_values(space, u)
    power = gradient_power(values, graph, partition.delta, q)
    spread = 2 * (1 + partition.eps / partition.delta) + 4
    local_lip = np.array(
        [
            ball_lipschitz(space, point_values, center, 6 * partition.delta)
            for center in partition.centers
        ]
    )
    bound = graph.degree * spread**q * local_lip**q
    excess = power - bound
    slack_tolerance = 1e-12 * np.maximum(bound, 1.0)

    if doubling is None:
        doubling = doubling_constants(space, default_ball_grid(space))
    c_d = doubling.values["c_D_metric"]
    uniform_bound = c_d**3 * spread**q * local_lip**q

    report = Report(name="lipschitz_energy_bound")
    report.record(
        "cellwise_bound",
        bool(np.all(excess <= slack_tolerance)),
        worst=float(excess.max()) if excess.size else 0.0,
        bound=0.0,
        detail="|D u|^q - deg * spread^q * Lip^q per cell",
    )
    report.values.update(
        {
            "spread": spread,
            "c_D_metric": c_d,
            "uniform_bound_holds": bool(np.all(power <= uniform_bound + slack_tolerance)),
        }
    )
    report.tables["cells"] = pd.DataFrame(
        {"gradient_power": power, "local_lipschitz": local_lip, "bound": bound}
    )
    return report
