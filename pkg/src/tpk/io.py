"""JSON formats shared by the library and the command line.

Matrix schema::

    {"rows": int, "cols": int, "data": [[re, im], ...]}   # row-major

Floats are written with 17 significant digits.
"""

import json
import math
import sys

import numpy as np

from .errors import SchemaError
from .linalg import as_cmatrix
from .subspaces import Projector

__all__ = [
    "dumps",
    "matrix_to_json",
    "matrix_from_json",
    "pair_to_json",
    "pair_from_json",
    "decomposition_to_json",
    "halmos_to_json",
    "load_pair",
]


def _fmt_float(x):
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    s = format(x, ".17g")
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def _encode(obj, indent, level):
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + ",".join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # short numeric rows stay on one line
        if all(isinstance(v, (int, float, np.integer, np.floating)) for v in obj):
            return "[" + ", ".join(_encode(v, None, 0) for v in obj) + "]"
        items = [f"{pad}{_encode(v, indent, level + 1)}" for v in obj]
        return "[" + ",".join(items) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """``json.dumps`` replacement that prints every float with 17 significant digits."""
    return _encode(obj, indent, 0)


def matrix_to_json(m):
    m = as_cmatrix(m)
    flat = m.reshape(-1)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_json(obj):
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad matrix object: {exc}") from None
    if rows < 0 or cols < 0 or len(data) != rows * cols:
        raise SchemaError(f"matrix has {len(data)} entries, expected {rows}x{cols}")
    try:
        arr = np.array([complex(float(re), float(im)) for re, im in data], dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad matrix entry: {exc}") from None
    if not np.all(np.isfinite(arr)):
        raise SchemaError("matrix has non-finite entries")
    return arr.reshape(rows, cols)


def pair_to_json(p, q, spec=None):
    out = {"p": matrix_to_json(p.matrix), "q": matrix_to_json(q.matrix)}
    if spec is not None:
        out["spec"] = spec.to_dict()
    return out


def pair_from_json(obj):
    try:
        pm, qm = obj["p"], obj["q"]
    except (KeyError, TypeError):
        raise SchemaError('pair object needs "p" and "q" matrices') from None
    return Projector.from_matrix(matrix_from_json(pm)), Projector.from_matrix(matrix_from_json(qm))


def load_pair(path):
    if path == "-":
        return pair_from_json(json.load(sys.stdin))
    with open(path) as fh:
        return pair_from_json(json.load(fh))


def decomposition_to_json(dec):
    return {
        "ranks": list(dec.ranks),
        "bases": [matrix_to_json(b.basis) for b in dec.bases],
    }


def halmos_to_json(form):
    return {
        "ranks": list(form.ranks),
        "u_pq": matrix_to_json(form.u_pq),
        "q0": matrix_to_json(form.q0),
        "u0": matrix_to_json(form.u0),
    }
