"""Binary PPM (P6) heatmaps of U-value and difference grids."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import EmptyMapError, ValidationError
from .gridio import AtomicOutputs
from .raster import Grid

RGB = Tuple[int, int, int]

# Dark blue through cyan, yellow to dark red; loosely modelled on "jet".
SEQUENTIAL: Sequence[RGB] = (
    (0, 0, 131), (0, 60, 170), (5, 255, 255), (255, 255, 0), (250, 0, 0), (128, 0, 0),
)
# Blue-white-red with white at the midpoint, so zero maps to white on a symmetric range.
DIVERGING: Sequence[RGB] = (
    (5, 48, 97), (67, 147, 195), (255, 255, 255), (214, 96, 77), (103, 0, 31),
)


@dataclass(frozen=True)
class HeatmapStyle:
    palette: Sequence[RGB] = SEQUENTIAL
    range: Optional[Tuple[float, float]] = None
    masked_color: RGB = (128, 128, 128)
    symmetric: bool = False
    scale: int = 1

    def __post_init__(self):
        if len(self.palette) < 2:
            raise ValidationError("palette needs at least two colors")
        if self.range is not None and not self.range[0] < self.range[1]:
            raise ValidationError(f"heatmap range must have min < max, got {self.range}")
        if int(self.scale) != self.scale or self.scale < 1:
            raise ValidationError("scale must be a positive integer")

    @classmethod
    def diverging(cls, **kw) -> "HeatmapStyle":
        return cls(palette=DIVERGING, symmetric=True, **kw)


def _value_range(grid: Grid, style: HeatmapStyle) -> tuple[float, float]:
    if style.range is not None:
        return style.range
    vals = grid.values[grid.valid]
    if style.symmetric:
        m = float(np.max(np.abs(vals)))
        return (-m, m)
    return float(vals.min()), float(vals.max())


def colorize(grid: Grid, style: HeatmapStyle) -> np.ndarray:
    """Map each cell to an RGB triple; returns a (rows, cols, 3) uint8 array.

    Row 0 of the grid (wall bottom) becomes the last image row.
    """
    if grid.count == 0:
        raise EmptyMapError("cannot draw a heatmap of a fully masked grid")
    lo, hi = _value_range(grid, style)
    ramp = np.asarray(style.palette, dtype=float)
    n = len(ramp) - 1
    vals = grid.filled(lo)
    if hi > lo:
        pos = np.clip((vals - lo) / (hi - lo), 0.0, 1.0) * n
    else:
        pos = np.full(vals.shape, n / 2.0)
    idx = np.minimum(np.floor(pos).astype(int), n - 1)
    frac = (pos - idx)[..., None]
    rgb = ramp[idx] * (1.0 - frac) + ramp[idx + 1] * frac
    out = np.rint(rgb).astype(np.uint8)
    out[grid.mask] = style.masked_color
    return out[::-1]


def render_ppm(grid: Grid, style: HeatmapStyle = HeatmapStyle()) -> bytes:
    img = colorize(grid, style)
    if style.scale > 1:
        img = np.repeat(np.repeat(img, style.scale, axis=0), style.scale, axis=1)
    h, w = img.shape[:2]
    return f"P6\n{w} {h}\n255\n".encode("ascii") + img.tobytes()


def emit_heatmap(grid: Grid, style: HeatmapStyle, path) -> None:
    with AtomicOutputs() as out:
        out.write_bytes(path, render_ppm(grid, style))
