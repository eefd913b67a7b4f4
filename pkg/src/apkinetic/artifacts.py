"""CSV and manifest output.

Fields are written as ``i,j,x,v,value`` rows, profiles as ``i,x,value``,
tables as ``param,error,order``; floats with 17 significant digits so that
reading back is exact.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .grid import GridSpec


def fmt(value) -> str:
    value = float(value)
    return "" if math.isnan(value) else format(value, ".17g")


def _parse(text: str) -> float:
    return float("nan") if text == "" else float(text)


def write_field(path, field: np.ndarray, grid: GridSpec) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "j", "x", "v", "value"])
        for i in range(grid.n_x):
            xi = fmt(grid.x[i])
            for j in range(grid.n_v):
                w.writerow([i, j, xi, fmt(grid.v[j]), fmt(field[i, j])])
    return path


def read_field(path) -> np.ndarray:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    n_x = max(int(r["i"]) for r in rows) + 1
    n_v = max(int(r["j"]) for r in rows) + 1
    out = np.full((n_x, n_v), np.nan)
    for r in rows:
        out[int(r["i"]), int(r["j"])] = _parse(r["value"])
    return out


def write_columns(path, columns: dict[str, np.ndarray]) -> Path:
    """Equal-length columns, one row per entry; integer columns stay integers."""
    path = Path(path)
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for row in zip(*arrays):
            w.writerow([int(c) if np.issubdtype(type(c), np.integer) else fmt(c) for c in row])
    return path


def read_columns(path) -> dict[str, np.ndarray]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        names = next(reader)
        rows = [[_parse(c) for c in row] for row in reader]
    data = np.array(rows, dtype=float).reshape(len(rows), len(names))
    return {n: data[:, k] for k, n in enumerate(names)}


def write_profile(path, values: np.ndarray, grid: GridSpec) -> Path:
    return write_columns(path, {"i": np.arange(grid.n_x), "x": grid.x, "value": values})


def write_table(path, table) -> Path:
    return write_columns(path, {"param": table.params, "error": table.errors,
                                "order": table.orders})


def write_manifest(path, payload: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_default) + "\n")
    return path


def _default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")
