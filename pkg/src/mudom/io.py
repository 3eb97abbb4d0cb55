"""JSON and CSV encodings.  Complex numbers are always ``[re, im]`` pairs;
matrices are lists of rows of such pairs."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError

SCHEMA_VERSION = "mudom.report.v1"

__all__ = [
    "SCHEMA_VERSION",
    "decode_complex",
    "decode_matrix",
    "decode_point",
    "encode_complex",
    "encode_matrix",
    "encode_point",
    "load_json_arg",
    "matrix_from_csv",
    "matrix_to_csv",
]


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def decode_complex(v) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise InvalidArgumentError(f"complex numbers are [re, im] pairs, got {v!r}")
    re, im = (float(t) for t in v)
    if not (math.isfinite(re) and math.isfinite(im)):
        raise InvalidArgumentError("complex entries must be finite")
    return complex(re, im)


def encode_point(x) -> list[list[float]]:
    return [encode_complex(v) for v in np.asarray(x, dtype=complex).ravel()]


def decode_point(obj) -> np.ndarray:
    if isinstance(obj, dict):
        obj = obj.get("point", obj.get("x"))
    if not isinstance(obj, (list, tuple)):
        raise InvalidArgumentError("a point is a list of [re, im] pairs")
    return np.array([decode_complex(v) for v in obj], dtype=complex)


def encode_matrix(A) -> list[list[list[float]]]:
    A = np.asarray(A, dtype=complex)
    return [[encode_complex(v) for v in row] for row in A]


def decode_matrix(obj) -> np.ndarray:
    if isinstance(obj, dict):
        obj = obj.get("matrix", obj.get("A"))
    if not isinstance(obj, (list, tuple)) or not obj:
        raise InvalidArgumentError("a matrix is a non-empty list of rows")
    rows = [[decode_complex(v) for v in row] for row in obj]
    if len({len(r) for r in rows}) != 1:
        raise InvalidArgumentError("matrix rows have different lengths")
    return np.array(rows, dtype=complex)


def matrix_to_csv(A) -> str:
    """Rows of interleaved ``re, im`` columns."""
    buf = io.StringIO()
    w = csv.writer(buf)
    for row in np.asarray(A, dtype=complex):
        w.writerow([repr(float(t)) for v in row for t in (v.real, v.imag)])
    return buf.getvalue()


def matrix_from_csv(text: str) -> np.ndarray:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    try:
        vals = [[float(t) for t in r] for r in rows]
    except ValueError as exc:
        raise InvalidArgumentError(f"non-numeric CSV entry: {exc}") from exc
    if not vals or any(len(r) % 2 or len(r) != len(vals[0]) for r in vals):
        raise InvalidArgumentError("CSV matrix needs an even, constant number of columns")
    arr = np.asarray(vals)
    return arr[:, 0::2] + 1j * arr[:, 1::2]


def load_json_arg(arg: str):
    """Parse ``arg`` as inline JSON, or read it from a file path (``.csv`` for matrices)."""
    text = arg.strip()
    if text[:1] in "[{" or text[:1].isdigit() or text[:1] == "-":
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidArgumentError(f"invalid JSON argument: {exc}") from exc
    path = Path(arg)
    try:
        content = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read {arg}: {exc.strerror}") from exc
    if path.suffix.lower() == ".csv":
        return encode_matrix(matrix_from_csv(content))
    try:
        return json.loads(content)
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"invalid JSON in {arg}: {exc}") from exc
