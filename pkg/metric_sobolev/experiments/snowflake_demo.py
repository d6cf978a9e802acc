"""
Mass scaling on the Von Koch prefractal.
"""

import math

from ..diagnostics import mass_scaling_slope
from ..fields import first_coordinate
from ..report import Report
from ..slopes import slope_estimate
from .base import BaseExperiment

KOCH_DIMENSION = math.log(4) / math.log(3)
SLOPE_RTOL = 0.05
RADIUS_LEVELS = 5


class SnowflakeDemo(BaseExperiment):
    """Fit the log-log mass scaling slope and compare it with ln 4 / ln 3.

    Radii are 1.5 * 3^-k for k = 1..5. The first coordinate, a Lipschitz
    function on the curve, must also have a nonzero slope estimate at every
    vertex.
    """

    experiment_name = "snowflake-demo"

    def execute(self) -> Report:
        space = self.build_space()
        radii = [1.5 * 3.0**-k for k in range(1, RADIUS_LEVELS + 1)]
        self.status_queue.put("Fitting mass scaling slope.")
        slope = mass_scaling_slope(space, radii)
        error = abs(slope - KOCH_DIMENSION) / KOCH_DIMENSION

        report = Report(name=self.experiment_name)
        report.values.update(
            {"slope": slope, "dimension": KOCH_DIMENSION, "relative_error": error, "radii": radii}
        )
        report.record("dimension_fit", error <= SLOPE_RTOL, worst=error, bound=SLOPE_RTOL)

        radius = self.config.radius or 3 * space.min_positive_distance
        slopes = slope_estimate(space, first_coordinate(space), radius).values
        smallest = float(slopes.min())
        report.values["slope_radius"] = radius
        report.record(
            "linear_map_slope",
            smallest > 0,
            worst=smallest,
            bound=0.0,
            detail="smallest slope estimate of x1 over the vertices",
        )
        return report
