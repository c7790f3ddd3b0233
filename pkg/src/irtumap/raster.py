"""Grids, mesh resampling and per-pixel indoor reference temperatures.

Row index 0 is the bottom of the wall; rows count upward. Masks follow the
numpy.ma convention: ``True`` marks an invalid (masked) cell, and masked
values are stored as NaN so they can never leak into arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True, eq=False)
class Grid:
    """Rectangular field of floats with a validity mask; immutable."""

    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ValidationError(f"grid must be 2-D with at least one cell, got shape {values.shape}")
        if self.mask is None:
            mask = np.zeros(values.shape, dtype=bool)
        else:
            mask = np.array(self.mask, dtype=bool)
        if mask.shape != values.shape:
            raise ValidationError(f"mask shape {mask.shape} does not match values {values.shape}")
        mask = mask | ~np.isfinite(values)
        values[mask] = np.nan
        self._check(values, mask)
        values.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mask", mask)

    def _check(self, values, mask):
        pass

    @classmethod
    def from_array(cls, values, mask=None):
        return cls(np.asarray(values, dtype=float), mask)

    @classmethod
    def constant(cls, value: float, rows: int, cols: int):
        return cls(np.full((rows, cols), float(value)), None)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    @property
    def valid(self) -> np.ndarray:
        return ~self.mask

    @property
    def count(self) -> int:
        return int(self.valid.sum())

    def filled(self, fill: float = np.nan) -> np.ndarray:
        out = self.values.copy()
        out[self.mask] = fill
        return out

    def subgrid(self, rows: slice, cols: slice):
        return type(self)(self.values[rows, cols], self.mask[rows, cols])

    def __eq__(self, other):
        if not isinstance(other, Grid) or other.shape != self.shape:
            return NotImplemented
        return bool(
            np.array_equal(self.mask, other.mask)
            and np.array_equal(self.values[self.valid], other.values[other.valid])
        )


class TemperatureRaster(Grid):
    """Grid of temperatures in kelvin; every unmasked cell finite and > 0."""

    def _check(self, values, mask):
        bad = (~mask) & (values <= 0)
        if np.any(bad):
            r, c = np.argwhere(bad)[0]
            raise ValidationError(
                f"non-physical temperature {values[r, c]} K at cell ({r}, {c})"
            )


@dataclass(frozen=True)
class MeshSpec:
    rows: int = 30
    cols: int = 40

    def __post_init__(self):
        if int(self.rows) != self.rows or int(self.cols) != self.cols or self.rows < 1 or self.cols < 1:
            raise ValidationError(f"mesh dimensions must be positive integers, got {self.rows}x{self.cols}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)


@dataclass(frozen=True, eq=False)
class SensorMatrix:
    """Air temperatures from a rectangular array of sensors near the indoor surface."""

    temperatures: np.ndarray

    def __post_init__(self):
        t = np.array(self.temperatures, dtype=float)
        if t.ndim != 2 or t.size == 0:
            raise ValidationError("sensor matrix must be a non-empty 2-D array")
        if not np.all(np.isfinite(t)) or np.any(t <= 0):
            raise ValidationError("sensor temperatures must be finite and > 0 K")
        t.setflags(write=False)
        object.__setattr__(self, "temperatures", t)

    @property
    def rows(self) -> int:
        return self.temperatures.shape[0]

    @property
    def cols(self) -> int:
        return self.temperatures.shape[1]


@dataclass(frozen=True)
class SinglePoint:
    t: float

    def __post_init__(self):
        if not np.isfinite(self.t) or self.t <= 0:
            raise ValidationError(f"single-point temperature must be > 0 K, got {self.t}")


@dataclass(frozen=True)
class Matrix:
    m: SensorMatrix


@dataclass(frozen=True)
class SurfaceRaster:
    r: TemperatureRaster


IndoorTemperatureInput = Union[SinglePoint, Matrix, SurfaceRaster]


def _overlap_weights(n_src: int, n_dst: int) -> np.ndarray:
    """Fraction of each source cell falling in each destination cell along one axis.

    Returns an (n_dst, n_src) matrix whose columns sum to one.
    """
    # Work in units of 1/(n_src*n_dst) so all edges are integers.
    src_edges = np.arange(n_src + 1) * n_dst
    dst_edges = np.arange(n_dst + 1) * n_src
    lo = np.maximum(dst_edges[:-1, None], src_edges[None, :-1])
    hi = np.minimum(dst_edges[1:, None], src_edges[None, 1:])
    return np.clip(hi - lo, 0, None) / float(n_dst)


def resample_to_mesh(raster: Grid, mesh: MeshSpec) -> Grid:
    """Area-weighted downsampling to ``mesh``; masked cells are excluded from each mean."""
    if raster.rows < mesh.rows or raster.cols < mesh.cols:
        raise ValidationError(
            f"cannot upsample a {raster.rows}x{raster.cols} raster to a {mesh.rows}x{mesh.cols} mesh"
        )
    if raster.shape == mesh.shape:
        return raster
    wr = _overlap_weights(raster.rows, mesh.rows)
    wc = _overlap_weights(raster.cols, mesh.cols)
    valid = raster.valid.astype(float)
    weight = wr @ valid @ wc.T
    total = wr @ raster.filled(0.0) @ wc.T
    empty = weight <= 0
    out = np.divide(total, weight, out=np.full(mesh.shape, np.nan), where=~empty)
    return type(raster)(out, empty)


def _bilinear_expand(m: SensorMatrix, mesh: MeshSpec) -> np.ndarray:
    # Sensor k sits at the centre of its block; values clamp beyond the outer centres.
    sensor_r = (np.arange(m.rows) + 0.5) * mesh.rows / m.rows
    sensor_c = (np.arange(m.cols) + 0.5) * mesh.cols / m.cols
    pix_r = np.arange(mesh.rows) + 0.5
    pix_c = np.arange(mesh.cols) + 0.5
    along_rows = np.stack([np.interp(pix_r, sensor_r, m.temperatures[:, j]) for j in range(m.cols)], axis=1)
    return np.stack([np.interp(pix_c, sensor_c, along_rows[i]) for i in range(mesh.rows)], axis=0)


def indoor_field(
    indoor: IndoorTemperatureInput, mesh: MeshSpec, matrix_expansion: str = "block"
) -> TemperatureRaster:
    """Per-pixel indoor reference temperature on ``mesh`` for any of the three input kinds.

    A sensor matrix expands piecewise-constantly by default: pixel ``(i, j)``
    takes sensor ``(m_rows*i // rows, m_cols*j // cols)``. ``matrix_expansion=
    "bilinear"`` interpolates between sensor block centres instead.
    """
    if isinstance(indoor, SinglePoint):
        return TemperatureRaster.constant(indoor.t, mesh.rows, mesh.cols)
    if isinstance(indoor, Matrix):
        m = indoor.m
        if matrix_expansion == "block":
            ri = (m.rows * np.arange(mesh.rows)) // mesh.rows
            ci = (m.cols * np.arange(mesh.cols)) // mesh.cols
            return TemperatureRaster(m.temperatures[np.ix_(ri, ci)], None)
        if matrix_expansion == "bilinear":
            return TemperatureRaster(_bilinear_expand(m, mesh), None)
        raise ValidationError(f"unknown matrix expansion {matrix_expansion!r}")
    if isinstance(indoor, SurfaceRaster):
        return resample_to_mesh(indoor.r, mesh)
    raise ValidationError(f"unsupported indoor input {type(indoor).__name__}")


def average_rasters(rasters: Sequence[Grid]) -> Grid:
    """Cellwise mean; a cell masked in any input is masked in the result."""
    if len(rasters) == 0:
        raise ValidationError("need at least one raster to average")
    shape = rasters[0].shape
    for r in rasters[1:]:
        if r.shape != shape:
            raise ValidationError(f"shape mismatch: {r.shape} vs {shape}")
    if len(rasters) == 1:
        return rasters[0]
    mask = np.logical_or.reduce([r.mask for r in rasters])
    # Sort per cell before summing so the result does not depend on argument order.
    stack = np.sort(np.stack([r.filled(0.0) for r in rasters]), axis=0)
    mean = np.sum(stack, axis=0) / len(rasters)
    return type(rasters[0])(mean, mask)
