"""JSON and CSV serialisation of reports and sampled fields."""

from __future__ import annotations

import csv
import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from .grid import Axis, GridSpec, SampledField

__all__ = [
    "to_jsonable",
    "dumps",
    "load_schema",
    "write_series_csv",
    "write_density_csv",
    "read_density_csv",
    "write_corpus_csv",
]

SCHEMAS = (
    "admissibility_report",
    "certificate",
    "cf_property_report",
    "verdict_report",
    "falsification_report",
)


def to_jsonable(obj):
    """Convert numpy scalars/arrays, tuples and non-finite floats for JSON."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def dumps(obj) -> str:
    """Deterministic JSON text (sorted keys, no NaN/inf)."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_schema(name: str) -> dict:
    if name not in SCHEMAS:
        raise KeyError(f"unknown schema {name!r}")
    text = resources.files("qchar").joinpath("schemas", f"{name}.json").read_text("utf-8")
    return json.loads(text)


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_series_csv(path, coords, values, coord_name: str = "x") -> None:
    """One-dimensional dump with columns ``coord, value_re, value_im``."""
    values = np.asarray(values, dtype=complex)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([coord_name, "value_re", "value_im"])
        for c, v in zip(np.asarray(coords, dtype=float), values):
            w.writerow([_fmt(c), _fmt(v.real), _fmt(v.imag)])


def write_density_csv(path, field: SampledField) -> None:
    """Grid dump with columns ``x1, ..., xn, r`` (real part of the field)."""
    grid = field.grid
    names = [f"x{j + 1}" for j in range(grid.ndim)] + ["r"]
    axes = [grid.points(ax) for ax in range(grid.ndim)]
    values = np.real(field.values)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for idx in np.ndindex(*grid.shape):
            w.writerow([_fmt(axes[ax][i]) for ax, i in enumerate(idx)] + [_fmt(values[idx])])


def read_density_csv(path) -> SampledField:
    """Inverse of :func:`write_density_csv` for uniform grids."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float)
    ndim = len(header) - 1
    axes = []
    for ax in range(ndim):
        pts = np.unique(body[:, ax])
        axes.append(Axis(float(pts[0]), float(pts[-1]), len(pts)))
    grid = GridSpec(tuple(axes))
    return SampledField(grid, body[:, -1].reshape(grid.shape), "density")


def write_corpus_csv(fh, rows) -> None:
    w = csv.writer(fh)
    w.writerow(["index", "poly", "checker", "rederived", "route", "verdict", "expected", "routing_error"])
    for r in rows:
        w.writerow([r.index, r.poly, r.checker, r.rederived, r.route, r.verdict,
                    r.expected, r.routing_error])


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")
