"""
Define custom typing arguments for type hinting.
"""

from typing import Any

import numpy as np
import numpy.typing as npt

FloatArray = npt.NDArray[np.float64]
IndexArray = npt.NDArray[np.intp]
BoolArray = npt.NDArray[np.bool_]

PointIndex = int
CellPair = tuple[int, int]
PointPair = tuple[PointIndex, PointIndex]

BallSample = tuple[PointIndex, float]
BallGrid = list[BallSample]

# (id, id, length) of a graph edge
Edge = tuple[str, str, float]

JSONDict = dict[str, Any]
