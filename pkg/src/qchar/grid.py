"""Uniform rectangular grids and fields sampled on them."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np
from scipy.integrate import trapezoid

__all__ = ["Axis", "GridSpec", "SampledField", "outer"]

MIN_COUNT = 16
FIELD_KINDS = ("density", "cf", "sn_term")


@dataclass(frozen=True)
class Axis:
    min: float
    max: float
    count: int

    def __post_init__(self):
        if not self.min < self.max:
            raise ValueError(f"axis needs min < max, got [{self.min}, {self.max}]")
        if self.count < MIN_COUNT:
            raise ValueError(f"axis count must be >= {MIN_COUNT}, got {self.count}")

    @property
    def spacing(self) -> float:
        return (self.max - self.min) / (self.count - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class GridSpec:
    """Tensor-product grid; one :class:`Axis` per dimension."""

    axes: tuple

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        if not self.axes:
            raise ValueError("grid needs at least one axis")

    @classmethod
    def uniform(cls, lo: float, hi: float, count: int, ndim: int = 1) -> GridSpec:
        return cls(tuple(Axis(float(lo), float(hi), int(count)) for _ in range(ndim)))

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple:
        return tuple(a.count for a in self.axes)

    @property
    def spacing(self) -> tuple:
        return tuple(a.spacing for a in self.axes)

    def points(self, axis: int = 0) -> np.ndarray:
        return self.axes[axis].points

    def scaled(self, factor: float) -> GridSpec:
        """Same grid with every coordinate multiplied by ``factor > 0``."""
        return GridSpec(tuple(Axis(a.min * factor, a.max * factor, a.count) for a in self.axes))

    def to_dict(self) -> dict:
        return {"axes": [{"min": a.min, "max": a.max, "count": a.count} for a in self.axes]}


@dataclass(frozen=True)
class SampledField:
    grid: GridSpec
    values: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")

    @property
    def real(self) -> np.ndarray:
        return np.real(self.values)

    def max_imag_ratio(self) -> float:
        """``max|Im| / max|Re|`` (inf when the real part vanishes)."""
        im = float(np.max(np.abs(np.imag(self.values))))
        re = float(np.max(np.abs(np.real(self.values))))
        if im == 0.0:
            return 0.0
        return im / re if re > 0 else float("inf")

    def integrate(self, axes: Sequence[int] | None = None):
        """Trapezoidal integral over ``axes`` (all axes by default)."""
        axes = range(self.grid.ndim) if axes is None else axes
        out = self.values
        # integrate from the last axis so earlier indices stay valid
        for ax in sorted(axes, reverse=True):
            out = trapezoid(out, self.grid.points(ax), axis=ax)
        return out

    def marginal(self, axis: int) -> np.ndarray:
        """Integrate out every axis except ``axis``."""
        return self.integrate([ax for ax in range(self.grid.ndim) if ax != axis])


def outer(vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Tensor (outer) product of 1-D arrays."""
    return reduce(np.multiply.outer, vectors)
