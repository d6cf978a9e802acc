"""
Module for extending functionality for saving results.
"""

import json
import math
import os
from collections.abc import Mapping
from typing import Any, Union

import numpy as np
import pandas as pd

from . import validating

save_options = {"CSV": ".csv", "JSON": ".json"}
save_options = validating.sort_dict_by_keys(save_options)

FLOAT_FORMAT = "%.17g"


def format_float(value: float) -> str:
    """Render a float with 17 significant digits as a JSON token.

    Examples
    --------
    >>> format_float(0.1)
    '0.10000000000000001'
    >>> format_float(float("inf"))
    'Infinity'
    """

    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    text = FLOAT_FORMAT % value
    # Keep integral floats recognisable as floats on re-read.
    if not any(char in text for char in ".en"):
        text += ".0"
    return text


def to_jsonable(obj: Any) -> Any:
    """Convert numpy/pandas containers into plain Python containers."""

    if isinstance(obj, pd.DataFrame):
        return {str(column): to_jsonable(obj[column].tolist()) for column in obj.columns}
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Mapping):
        return {str(key): to_jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(item) for item in items]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return obj


def dumps(obj: Any) -> str:
    """Serialize to JSON deterministically.

    Keys are sorted and every float is written with 17 significant
    digits, so the same object always yields the same bytes and floats
    re-read bit-exactly.
    """

    obj = to_jsonable(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, dict):
        items = (
            f"{json.dumps(key)}: {dumps(value)}" for key, value in sorted(obj.items())
        )
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, list):
        return "[" + ", ".join(dumps(item) for item in obj) + "]"
    raise TypeError(f"Object of type '{type(obj)}' is not JSON serializable.")


def save_results(
    results: dict, data_dir: Union[str, os.PathLike[str]], output_format: str
) -> list[str]:
    """Export DataFrame objects to specified directory.

    Parameters
    ----------
    results : dict
        Dictionary of pandas.DataFrame objects to be saved, keyed by the
        output file stem.
    data_dir : str or PathLike str
        Path for parent directory to save files to.
    output_format : str
        Format for saved results. Acceptable options are seen in
        save_options.

    Returns
    -------
    filepaths : list of str

    Raises
    ------
    TypeError
        "results" not of type dict.
    ValueError
        Incorrect output_format provided.

    See Also
    --------
    save_options : Output format to extension dict.
    """

    if not isinstance(results, dict):
        raise TypeError(f"results must be of type dict, not '{type(results)}'.")

    try:
        extension = save_options[output_format.upper()]
    except KeyError as invalid_format:
        raise ValueError(
            f"output_format must be one of {list(save_options.keys())}, "
            f"not '{output_format}'."
        ) from invalid_format

    os.makedirs(data_dir, exist_ok=True)

    filepaths = []
    for stem, table in sorted(results.items()):
        output_filename = validating.validate_save_filename(f"{stem}{extension}")
        filepath = os.path.join(data_dir, output_filename)
        save_dataframe(results=table, filepath=filepath, output_format=output_format)
        filepaths.append(filepath)

    return filepaths


def save_dataframe(
    results: pd.DataFrame, filepath: Union[str, os.PathLike[str]], output_format: str
) -> None:
    """Saves the specified results to the file provided.

    Parameters
    ----------
    results : pandas.DataFrame
    filepath : str or PathLike str
    output_format : {'CSV', 'JSON'}

    Raises
    ------
    ValueError
        If a non-dataframe object results or an incorrect output_format
        is provided.

    Examples
    --------
    >>> data = {"delta": [0.2, 0.1], "F": [1.5, 1.25]}
    >>> save_dataframe(
    ...     results=data,
    ...     filepath='data/ladder.csv',
    ...     output_format='CSV'
    ... )
    Traceback (most recent call last):
        ...
    ValueError: 'results' must be of type pandas.DataFrame, not '<class 'dict'>'.
    """

    if not isinstance(results, pd.DataFrame):
        raise ValueError(
            f"'results' must be of type pandas.DataFrame, not" f" '{type(results)}'."
        )

    output_format = output_format.upper()
    if output_format == "CSV":
        results.to_csv(filepath, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    elif output_format == "JSON":
        with open(filepath, "w", encoding="utf-8") as output_file:
            output_file.write(dumps(results) + "\n")
    else:
        raise ValueError(
            f"'{output_format}' is not supported. 'output_format'"
            f" must be one of {list(save_options.keys())}."
        )


def emit_report(
    report: Any, filepath: Union[str, os.PathLike[str]], output_format: str = "json"
) -> str:
    """Write a report to disk deterministically.

    Parameters
    ----------
    report : Report
        Any report produced by a module operation.
    filepath : str or PathLike str
    output_format : {'json', 'csv'}
        JSON writes the full structured record; CSV writes the report's
        main table (``report.to_frame()``).

    Returns
    -------
    filepath : str

    Raises
    ------
    ValueError
        Unknown output_format.
    OSError
        The output path is not writable.
    """

    output_format = output_format.upper()
    directory = os.path.dirname(os.fspath(filepath))
    if directory:
        os.makedirs(directory, exist_ok=True)

    if output_format == "JSON":
        with open(filepath, "w", encoding="utf-8") as output_file:
            output_file.write(dumps(report.to_dict()) + "\n")
    elif output_format == "CSV":
        save_dataframe(report.to_frame(), filepath=filepath, output_format="CSV")
    else:
        raise ValueError(
            f"output_format must be one of {list(save_options.keys())}, "
            f"not '{output_format}'."
        )

    return os.fspath(filepath)
