import json
import logging
import os
from typing import Union

import jsonschema
import numpy as np
import pandas as pd

from seqgrowth.core.base.errors import MatrixFormatError
from seqgrowth.core.matrix.sym_matrix import SymMatrix

logger = logging.getLogger(__name__)

MATRIX_SCHEMA = {
    "type": "object",
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "entries": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}},
        },
    },
    "required": ["dim", "entries"],
}

FLOAT_FORMAT = "%.17g"


def _check_square(path: str, array: np.ndarray) -> np.ndarray:
    if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] < 1:
        raise MatrixFormatError(
            path, f"expected a non-empty square matrix, got shape {array.shape}"
        )
    if not np.all(np.isfinite(array)):
        raise MatrixFormatError(path, "matrix contains non-finite values")
    asymmetry = np.max(np.abs(array - array.T))
    if asymmetry > 1.0e-8 * (1.0 + np.max(np.abs(array))):
        logger.warning("Matrix in %s is asymmetric (%.3e); symmetrising", path, asymmetry)
    return array


def read_table(path: str) -> np.ndarray:
    """Reads a header-less numeric CSV into a 2-d float array."""
    try:
        frame = pd.read_csv(path, header=None, dtype=float, float_precision="round_trip")
    except (ValueError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise MatrixFormatError(path, str(e)) from e
    return frame.to_numpy(dtype=float)


def write_table(path: str, array: np.ndarray) -> None:
    pd.DataFrame(np.asarray(array, dtype=float)).to_csv(
        path, header=False, index=False, float_format=FLOAT_FORMAT
    )


def read_matrix(path: str) -> SymMatrix:
    """
    Reads a symmetric matrix from a ``.csv`` (d rows of d values, no header) or a ``.json``
    envelope ``{"dim": d, "entries": [[...], ...]}``.

    Raises:
        MatrixFormatError: If the file cannot be parsed into a finite square matrix.
        OSError: If the file cannot be read.
    """
    extension = os.path.splitext(path)[1].lower()
    if extension == ".json":
        with open(path, "r", encoding="utf-8") as file:
            try:
                document = json.load(file)
            except (json.JSONDecodeError, UnicodeDecodeError) as e:
                raise MatrixFormatError(path, str(e)) from e
        try:
            jsonschema.validate(document, MATRIX_SCHEMA)
        except jsonschema.ValidationError as e:
            raise MatrixFormatError(path, e.message) from e
        array = np.array(document["entries"], dtype=float)
        if array.shape != (document["dim"], document["dim"]):
            raise MatrixFormatError(
                path, f"entries have shape {array.shape}, but dim is {document['dim']}"
            )
    elif extension == ".csv":
        array = read_table(path)
    else:
        raise MatrixFormatError(path, f"unsupported extension '{extension}'")
    return SymMatrix(_check_square(path, array))


def write_matrix(path: str, matrix: Union[SymMatrix, np.ndarray]) -> None:
    """Writes a matrix as CSV or JSON (chosen by extension) with 17 significant digits."""
    array = np.asarray(matrix, dtype=float)
    extension = os.path.splitext(path)[1].lower()
    if extension == ".json":
        with open(path, "w") as file:
            # repr of a python float round-trips exactly
            json.dump({"dim": int(array.shape[0]), "entries": array.tolist()}, file)
    elif extension == ".csv":
        write_table(path, array)
    else:
        raise MatrixFormatError(path, f"unsupported extension '{extension}'")
