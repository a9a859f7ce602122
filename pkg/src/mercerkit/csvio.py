"""CSV and JSON serialization.

All floating-point output is printed with 17 significant digits, which is
enough for IEEE doubles to round-trip exactly, so files written here reload
bit-identically.  Output files are written atomically (temp file + rename).
"""
from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .errors import DimensionMismatchError

SIGNIFICANT_DIGITS = 17


def format_float(value: float) -> str:
    """Render a double with 17 significant digits (exact round trip)."""
    return format(float(value), ".17g")


def atomic_write_text(path: str, text: str) -> None:
    """Write a file atomically: temp file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_matrix(path: str, matrix) -> None:
    """Write a 2-D array as comma-separated rows, one row per line."""
    arr = np.atleast_2d(np.asarray(matrix, dtype=float))
    lines = [",".join(format_float(v) for v in row) for row in arr]
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_matrix(path: str) -> np.ndarray:
    """Read a comma-separated numeric file into a 2-D float array."""
    arr = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
    return arr


def save_points(path: str, points) -> None:
    """Write points as CSV, one point per row, columns = coordinates."""
    save_matrix(path, points)


def load_points(path: str) -> np.ndarray:
    """Read a points CSV into an (m, n) array."""
    return load_matrix(path)


def load_column(path: str) -> np.ndarray:
    """Read a single-column CSV (e.g. probe values aligned with a point list)."""
    arr = load_matrix(path)
    if arr.shape[1] != 1:
        raise DimensionMismatchError(
            f"expected a single-column file, got {arr.shape[1]} columns in {path}"
        )
    return arr[:, 0]


def save_column(path: str, values) -> None:
    arr = np.asarray(values, dtype=float).reshape(-1, 1)
    save_matrix(path, arr)


def _json_fragment(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if bool(value) else "false"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not np.isfinite(v):
            # JSON has no Infinity/NaN literals; absent values become null.
            return "null"
        return format_float(v)
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_json_fragment(v) for v in value) + "]"
    if isinstance(value, dict):
        items = sorted(value.items())
        parts = (json.dumps(str(k)) + ": " + _json_fragment(v) for k, v in items)
        return "{" + ", ".join(parts) + "}"
    raise TypeError(f"cannot serialize {type(value).__name__} to JSON")


def dump_json(value) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits.

    Identical inputs always produce byte-identical text, so reports can be
    compared across runs with a plain file diff.
    """
    return _json_fragment(value)


def save_json(path: str, value) -> None:
    atomic_write_text(path, dump_json(value) + "\n")
