"""CSV / JSON writers with round-trippable float formatting."""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

SCHEMA_VERSION = 1


def fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def columns_to_csv(columns: dict) -> str:
    names = list(columns)
    arrays = [np.asarray(columns[k]).ravel() for k in names]
    n = len(arrays[0])
    if any(len(a) != n for a in arrays):
        raise ValueError("all columns must have the same length")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for row in zip(*arrays):
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def to_json(kind: str, payload: dict, indent: int | None = 1) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "kind": kind}
    doc.update(_jsonable(payload))
    return json.dumps(doc, indent=indent, allow_nan=False) + "\n"


def grid_dict(g) -> dict:
    return {"lo": g.lo, "hi": g.hi, "n": g.n}


def wigner_to_json(field) -> str:
    return to_json(
        "wigner_field",
        {
            "hbar_e": field.hbar_e,
            "pgrid": grid_dict(field.pgrid),
            "qgrid": grid_dict(field.qgrid),
            "layout": "row-major, rows indexed by p",
            "values": field.values.ravel(),
        },
        indent=None,
    )


def wigner_to_csv(field) -> str:
    P, Q = np.meshgrid(field.pgrid.points, field.qgrid.points, indexing="ij")
    return columns_to_csv({"p": P, "q": Q, "W": field.values})
