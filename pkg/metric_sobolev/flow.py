"""
Implicit Euler gradient flow of the discrete energy on cell fields.

One step solves

    g = argmin (1/q) F_{delta,q}(g) + (1/(2 tau)) sum_i m(A_i) (g_i - f_i)^2

which for q = 2 is the linear system (M + tau L) g = M f.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np
import pandas as pd
from scipy import sparse
from scipy.sparse.linalg import spsolve

from ._typing import FloatArray
from .energy import CellField, cell_energy, cell_values, project_cells
from .exceptions import ConvergenceError, InvalidParameterError
from .partition import NeighborGraph, Partition, check_graph, check_partition
from .report import Report
from .space import FiniteMetricMeasureSpace, ScalarField
from .utils.validating import validate_count, validate_exponent, validate_positive

SMOOTHING_FLOOR = 1e-8
MIN_STEP = 2.0**-40
VALUE_RTOL = 1e-14
ARMIJO = 1e-4


@dataclass(frozen=True)
class FlowConfig:
    """Parameters of an implicit Euler run.

    Parameters
    ----------
    tau : float
        Time step.
    q : float
        Energy exponent > 1.
    steps : int
        Number of steps.
    solver_tol : float, optional (default=1e-10)
        Stop when the sup norm of the objective gradient is below this.
    max_inner_iterations : int, optional (default=500)
    """

    tau: float
    q: float
    steps: int
    solver_tol: float = 1e-10
    max_inner_iterations: int = 500

    def __post_init__(self) -> None:
        validate_positive("tau", self.tau)
        validate_exponent("q", self.q)
        validate_count("steps", self.steps, minimum=1)
        validate_positive("solver_tol", self.solver_tol)
        validate_count("max_inner_iterations", self.max_inner_iterations, minimum=1)


@dataclass(frozen=True)
class FlowState:
    """Snapshot of the flow after ``step_index`` steps.

    Attributes
    ----------
    objective_gap : float
        Objective at the minimizer clamped to the previous value range
        minus the objective at the minimizer; never negative for an exact
        minimizer.
    """

    step_index: int
    field: CellField
    energy: float
    mass: float
    min_value: float
    max_value: float
    objective_gap: float = 0.0


class _Objective:
    """J(g) = (1/q) F(g) + (1/(2 tau)) sum m_i (g_i - f_i)^2 and its derivatives.

    For q < 2 the edge term |d|^q / q is replaced below ``SMOOTHING_FLOOR``
    by the quadratic that matches it to first order at the floor, which
    changes each edge term by at most floor^q / q.
    """

    def __init__(
        self, partition: Partition, graph: NeighborGraph, f: FloatArray, config: FlowConfig
    ) -> None:
        self.f = f
        self.tau = config.tau
        self.q = config.q
        self.mass = partition.cell_mass
        if graph.pairs:
            self.i, self.j = np.array(graph.pairs, dtype=np.intp).T
        else:
            self.i = self.j = np.empty(0, dtype=np.intp)
        # (1/q) F(g) = (1/q) sum over unordered pairs of w_ij |g_i - g_j|^q
        self.weights = (self.mass[self.i] + self.mass[self.j]) / partition.delta**config.q
        n = partition.n_cells
        edges = np.arange(self.i.size)
        self.incidence = sparse.csr_matrix(
            (
                np.concatenate([np.ones(self.i.size), -np.ones(self.i.size)]),
                (np.concatenate([edges, edges]), np.concatenate([self.i, self.j])),
            ),
            shape=(self.i.size, n),
        )

    def _edge_terms(self, g: FloatArray) -> tuple[FloatArray, FloatArray, FloatArray]:
        """phi(|d|), signed phi'(|d|) and phi''(|d|) over the edge jumps d."""

        jump = g[self.i] - g[self.j]
        size = np.abs(jump)
        q = self.q
        phi = size**q / q
        slope = size ** (q - 1)
        if q >= 2:
            curvature = (q - 1) * size ** (q - 2)
        else:
            floor = SMOOTHING_FLOOR
            small = size < floor
            curvature = np.full_like(size, floor ** (q - 2))
            curvature[~small] = (q - 1) * size[~small] ** (q - 2)
            phi[small] = floor ** (q - 2) * size[small] ** 2 / 2 + floor**q * (1 / q - 0.5)
            slope[small] = floor ** (q - 2) * size[small]
        return phi, np.sign(jump) * slope, curvature

    def value(self, g: FloatArray) -> float:
        phi, _, _ = self._edge_terms(g)
        fidelity = float(self.mass @ (g - self.f) ** 2)
        return float(self.weights @ phi) + fidelity / (2 * self.tau)

    def gradient(self, g: FloatArray) -> FloatArray:
        _, flux, _ = self._edge_terms(g)
        return self.incidence.T @ (self.weights * flux) + self.mass * (g - self.f) / self.tau

    def laplacian(self, edge_weights: FloatArray) -> sparse.csr_matrix:
        return (self.incidence.T @ sparse.diags(edge_weights) @ self.incidence).tocsr()

    def hessian(self, g: FloatArray) -> sparse.csc_matrix:
        _, _, curvature = self._edge_terms(g)
        stiffness = self.laplacian(self.weights * curvature)
        return (sparse.diags(self.mass / self.tau) + stiffness).tocsc()


def _validate_flow_inputs(space, partition, graph) -> None:
    check_partition(space, partition)
    check_graph(partition, graph)
    if np.any(partition.cell_mass <= 0):
        raise InvalidParameterError("Every cell needs positive mass for the flow.")


def _sup(values: FloatArray) -> float:
    return float(np.max(np.abs(values)))


def _line_search(
    objective: _Objective,
    g: FloatArray,
    direction: FloatArray,
    current: float,
    decrement: float,
) -> float:
    """Largest step in 1, 1/2, 1/4, ... with sufficient decrease up to rounding.

    ``decrement`` is -gradient . direction; objective changes below
    ``VALUE_RTOL`` of its size count as no change.
    """

    slack = VALUE_RTOL * max(1.0, abs(current))
    step = 1.0
    while step >= MIN_STEP:
        if objective.value(g + step * direction) <= current - ARMIJO * step * decrement + slack:
            return step
        step /= 2
    return 0.0


def _solve_step(objective: _Objective, config: FlowConfig) -> FloatArray:
    if config.q == 2:
        system = sparse.diags(objective.mass / config.tau) + objective.laplacian(objective.weights)
        system = system.tocsc()
        return np.atleast_1d(spsolve(system, objective.mass * objective.f / config.tau))

    g = objective.f.copy()
    current = objective.value(g)
    for _ in range(config.max_inner_iterations):
        gradient = objective.gradient(g)
        residual = _sup(gradient)
        if residual <= config.solver_tol:
            return g
        direction = -np.atleast_1d(spsolve(objective.hessian(g), gradient))
        decrement = max(0.0, -float(gradient @ direction))
        step = _line_search(objective, g, direction, current, decrement)
        if step == 0.0:
            # objective flat at rounding level, judge the full step by its residual
            if _sup(objective.gradient(g + direction)) >= residual:
                break
            step = 1.0
        g = g + step * direction
        current = objective.value(g)
        if step * _sup(direction) <= np.finfo(float).eps * max(1.0, _sup(g)):
            break
    residual = _sup(objective.gradient(g))
    if residual <= config.solver_tol:
        return g
    raise ConvergenceError(
        f"Implicit Euler step did not reach gradient norm {config.solver_tol} "
        f"within {config.max_inner_iterations} iterations.",
        last_iterate=g,
        residual=residual,
    )


def implicit_euler_step(
    space: FiniteMetricMeasureSpace,
    partition: Partition,
    graph: NeighborGraph,
    f: Union[CellField, FloatArray],
    config: FlowConfig,
) -> CellField:
    """Minimize (1/q) F(g) + (1/(2 tau)) sum m(A_i) (g_i - f_i)^2 over cell fields.

    For q = 2 the first-order conditions are solved directly. Otherwise a
    damped Newton iteration is used, halving the step until it gives an
    Armijo decrease. For q < 2 edge jumps below ``SMOOTHING_FLOOR`` enter
    through a quadratic that is C1 at the floor, so the stopping gradient
    is that of the smoothed objective.

    Raises
    ------
    ConvergenceError
        The gradient norm stays above ``solver_tol`` after
        ``max_inner_iterations`` iterations; carries the last iterate.
    """

    _validate_flow_inputs(space, partition, graph)
    values = np.array(cell_values(partition, f), dtype=float)
    objective = _Objective(partition, graph, values, config)
    return CellField(values=_solve_step(objective, config), partition_id=partition.partition_id)


def _state(step_index, values, partition, graph, config, objective_gap=0.0) -> FlowState:
    return FlowState(
        step_index=step_index,
        field=CellField(values=values, partition_id=partition.partition_id),
        energy=cell_energy(values, partition, graph, config.q),
        mass=float(partition.cell_mass @ values),
        min_value=float(values.min()),
        max_value=float(values.max()),
        objective_gap=objective_gap,
    )


def run_flow(
    space: FiniteMetricMeasureSpace,
    partition: Partition,
    graph: NeighborGraph,
    f0: Union[ScalarField, CellField, FloatArray],
    config: FlowConfig,
) -> list[FlowState]:
    """Project f0 to cells once and iterate implicit Euler steps.

    Returns
    -------
    trajectory : list of FlowState
        ``config.steps + 1`` states, the first being the projection of f0.
    """

    _validate_flow_inputs(space, partition, graph)
    if isinstance(f0, CellField):
        values = np.array(cell_values(partition, f0), dtype=float)
    else:
        values = np.array(project_cells(space, partition, f0).values, dtype=float)

    trajectory = [_state(0, values, partition, graph, config)]
    for step_index in range(1, config.steps + 1):
        objective = _Objective(partition, graph, values, config)
        following = _solve_step(objective, config)
        clamped = np.clip(following, values.min(), values.max())
        gap = objective.value(clamped) - objective.value(following)
        values = following
        trajectory.append(_state(step_index, values, partition, graph, config, gap))
    return trajectory


def flow_invariant_report(
    trajectory: list[FlowState],
    mass_tol: float = 1e-8,
    bound_tol: float = 1e-10,
    energy_tol: float = 1e-10,
) -> Report:
    """Check mass preservation, the maximum principle and energy dissipation.

    Raises
    ------
    InvalidParameterError
        Empty trajectory.
    """

    if not trajectory:
        raise InvalidParameterError("flow_invariant_report needs a nonempty trajectory.")
    frame = trajectory_frame(trajectory)
    initial = trajectory[0]
    drift = (frame["mass"] - initial.mass).abs()
    mass_bound = mass_tol * (1 + abs(initial.mass))
    below = float((initial.min_value - frame["min"]).max())
    above = float((frame["max"] - initial.max_value).max())
    increase = float(frame["energy"].diff().max()) if len(frame) > 1 else 0.0
    worst_gap = float(frame["objective_gap"].min())

    report = Report(name="flow_invariant_report")
    report.tables["trajectory"] = frame
    worst_drift = float(drift.max())
    report.record("mass", worst_drift <= mass_bound, worst=worst_drift, bound=mass_bound)
    report.record(
        "maximum_principle",
        below <= bound_tol and above <= bound_tol,
        worst=max(below, above),
        bound=bound_tol,
        detail="excursion outside the initial value range",
    )
    report.record(
        "clamped_competitor",
        worst_gap >= -energy_tol,
        worst=worst_gap,
        bound=-energy_tol,
        detail="objective of the clamped minimizer minus objective of the minimizer",
    )
    report.record(
        "energy_dissipation",
        increase <= energy_tol,
        worst=increase,
        bound=energy_tol,
        detail="largest step-to-step energy increase",
    )
    report.values.update({"steps": len(trajectory) - 1, "initial_mass": initial.mass})
    return report


def trajectory_frame(trajectory: list[FlowState]) -> pd.DataFrame:
    """One row per state: step, energy, mass, min, max, objective_gap."""

    return pd.DataFrame(
        {
            "step": [state.step_index for state in trajectory],
            "energy": [state.energy for state in trajectory],
            "mass": [state.mass for state in trajectory],
            "min": [state.min_value for state in trajectory],
            "max": [state.max_value for state in trajectory],
            "objective_gap": [state.objective_gap for state in trajectory],
        }
    )


def trajectory_fields(trajectory: list[FlowState]) -> dict[str, list[float]]:
    """Full cell values per step, keyed by step index, for JSON dumps."""

    return {str(state.step_index): state.field.values.tolist() for state in trajectory}
