"""
Named analytic fields used by the experiments.

Specs: ``constant(c)``, ``linear``, ``sin``, ``abs-kink``, ``indicator``,
``random(L)`` or a path to a JSON list of values. Analytic fields are
functions of the first coordinate x; on spaces without coordinates x is
the distance to the first point divided by the diameter.
"""

import json
import math
import os
from typing import Optional

import numpy as np
from scipy.special import gamma

from ._typing import FloatArray
from .exceptions import ConfigurationError, SpaceFormatError
from .generators import parse_spec
from .space import FiniteMetricMeasureSpace, ScalarField
from .utils.validating import validate_positive

RANDOM_CONES = 12
# Spaces on which the analytic Cheeger energies of the named fields apply.
UNIT_DOMAINS = ("interval", "grid2d")


def first_coordinate(space: FiniteMetricMeasureSpace) -> FloatArray:
    if space.coords is not None:
        return np.asarray(space.coords[:, 0], dtype=float)
    if space.diameter == 0:
        return np.zeros(space.n)
    return space.distance_row(0) / space.diameter


def random_lipschitz(space: FiniteMetricMeasureSpace, lipschitz: float, seed: int = 0) -> FloatArray:
    """Minimum of L-Lipschitz cones at random centers; Lip <= L."""

    rng = np.random.default_rng(seed)
    centers = rng.choice(space.n, size=min(RANDOM_CONES, space.n), replace=False)
    offsets = rng.random(centers.size) * lipschitz * max(space.diameter, 1.0) / 2
    cones = offsets[:, None] + lipschitz * space.distance_rows(centers)
    return cones.min(axis=0)


def build_field(space: FiniteMetricMeasureSpace, spec: str, seed: int = 0) -> ScalarField:
    """Evaluate a field spec on a space.

    Raises
    ------
    ConfigurationError
        Unknown spec or wrong arguments.
    SpaceFormatError
        Field file that is not a JSON list of one number per point.
    """

    if os.path.isfile(spec):
        try:
            with open(spec, encoding="utf-8") as handle:
                values = json.load(handle)
        except json.JSONDecodeError as bad_json:
            raise SpaceFormatError(f"Field file '{spec}' is not valid JSON: {bad_json}") from bad_json
        if not isinstance(values, list) or len(values) != space.n:
            raise SpaceFormatError(
                f"Field file '{spec}' must hold a list of {space.n} numbers."
            )
        return space.scalar_field(np.asarray(values, dtype=float))

    name, arguments = parse_spec(spec)
    x = first_coordinate(space)
    if name == "constant":
        level = float(arguments[0]) if arguments else 1.0
        values = np.full(space.n, level)
    elif name == "linear":
        values = x.copy()
    elif name == "sin":
        values = np.sin(2 * np.pi * x)
    elif name == "abs-kink":
        values = np.abs(x - 0.5)
    elif name == "indicator":
        values = (x <= 0.5).astype(float)
    elif name == "random":
        lipschitz = validate_positive("L", float(arguments[0]) if arguments else 1.0)
        values = random_lipschitz(space, lipschitz, seed)
    else:
        raise ConfigurationError(
            f"Unknown field '{spec}'; choose from constant(c), linear, sin, abs-kink, "
            "indicator, random(L) or a JSON file."
        )
    return space.scalar_field(values)


def reference_energy(spec: str, q: float) -> Optional[float]:
    """Analytic integral of |grad u|^q over the unit interval or square.

    Returns None when no closed form is known (indicator, random, files).

    Examples
    --------
    >>> round(reference_energy("sin", 2), 10) == round(2 * math.pi**2, 10)
    True
    """

    if os.path.isfile(spec):
        return None
    name, _ = parse_spec(spec)
    if name == "constant":
        return 0.0
    if name in ("linear", "abs-kink"):
        return 1.0
    if name == "sin":
        mean_cos = gamma((q + 1) / 2) / (math.sqrt(math.pi) * gamma(q / 2 + 1))
        return float((2 * math.pi) ** q * mean_cos)
    return None
