"""Text serialization of fields and deterministic report writers.

Field files are JSON objects::

    {"format": "trdevdiv-field", "kind": "scalar" | "vector" | "tensor",
     "dim": 2, "resolution": 8, "layout": "full" | "interior",
     "shape": [...], "symmetric": false, "values": [...]}

``values`` is the row-major flattening of an array of the given ``shape``
(components first, then nodes). Floats are written with ``repr`` so a
round trip is exact.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from trdevdiv.grid import GridSpec, Layout, ScalarField
from trdevdiv.tensor import TensorField, VectorField

__all__ = [
    "field_to_dict",
    "field_from_dict",
    "save_field",
    "load_field",
    "config_digest",
    "write_json",
    "write_csv",
    "FieldFormatError",
]

FORMAT = "trdevdiv-field"
_KINDS = {ScalarField: "scalar", VectorField: "vector", TensorField: "tensor"}


class FieldFormatError(ValueError):
    pass


def field_to_dict(fld) -> dict:
    kind = _KINDS.get(type(fld))
    if kind is None:
        raise TypeError(f"cannot serialize {type(fld).__name__}")
    out = {
        "format": FORMAT,
        "kind": kind,
        "dim": fld.grid.dim,
        "resolution": fld.grid.resolution,
        "layout": fld.layout.value,
        "shape": list(fld.values.shape),
        "values": [float(x) for x in fld.values.ravel()],
    }
    if kind == "tensor":
        out["symmetric"] = bool(fld.symmetric)
    return out


def field_from_dict(data: dict):
    try:
        if data.get("format") != FORMAT:
            raise FieldFormatError("not a trdevdiv field file")
        kind = data["kind"]
        grid = GridSpec(int(data["dim"]), int(data["resolution"]))
        layout = Layout(data["layout"])
        shape = tuple(int(k) for k in data["shape"])
        values = np.asarray(data["values"], dtype=float)
    except FieldFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FieldFormatError(f"malformed field file: {exc}") from exc
    if values.size != math.prod(shape):
        raise FieldFormatError(f"expected {math.prod(shape)} values for shape {shape}, got {values.size}")
    values = values.reshape(shape)
    try:
        if kind == "scalar":
            return ScalarField(grid, layout, values)
        if kind == "vector":
            return VectorField(grid, layout, values)
        if kind == "tensor":
            return TensorField(grid, layout, values, bool(data.get("symmetric", False)))
    except ValueError as exc:
        raise FieldFormatError(str(exc)) from exc
    raise FieldFormatError(f"unknown field kind {kind!r}")


def save_field(fld, path) -> None:
    Path(path).write_text(json.dumps(field_to_dict(fld)) + "\n")


def load_field(path):
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FieldFormatError(f"{path}: invalid JSON ({exc})") from exc
    return field_from_dict(data)


def config_digest(config: dict) -> str:
    """SHA-256 of the canonical JSON form of ``config``."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def _clean(obj):
    # JSON has no inf/nan; keep them as strings so files stay valid
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return _clean(obj.item())
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def write_json(path, payload: dict, meta: dict) -> None:
    body = {"meta": meta, **payload}
    Path(path).write_text(json.dumps(_clean(body), indent=2, sort_keys=True) + "\n")


def write_csv(path, columns, rows, meta: dict) -> None:
    """CSV with ``# key=value`` header lines carrying ``meta``."""
    with open(path, "w", newline="") as fh:
        for key in sorted(meta):
            fh.write(f"# {key}={meta[key]}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c, "")) for c in columns])


def _cell(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x
