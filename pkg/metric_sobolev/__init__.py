from . import diagnostics
from . import energy
from . import experiments
from . import flow
from . import generators
from . import hopf_lax
from . import partition
from . import slopes
from . import space
from .exceptions import (
    ConfigurationError,
    ConvergenceError,
    DisconnectedGraphError,
    EmptyCellError,
    InvalidParameterError,
    MetricSobolevError,
    MetricViolationError,
    MismatchError,
    SpaceFormatError,
)
from .generators import generate_space, resolve_space
from .space import FiniteMetricMeasureSpace, ScalarField

__version__ = "0.1.0"
