"""Per-pixel U-value maps, map averaging, differences, statistics and condition checks."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, EmptyMapError, ValidationError
from .physics import (
    DEFAULT_CONSTANTS,
    AirPropertyTable,
    AmbientConditions,
    PhysicalConstants,
    WallGeometry,
    exterior_flux,
)
from .raster import (
    Grid,
    IndoorTemperatureInput,
    Matrix,
    MeshSpec,
    SinglePoint,
    SurfaceRaster,
    TemperatureRaster,
    average_rasters,
    indoor_field,
    resample_to_mesh,
)

log = logging.getLogger(__name__)

MIN_DELTA_T_ACROSS_WALL = 15.0
MAX_WIND_SPEED = 1.0


class ComputationSetting(enum.Enum):
    SINGLE_POINT = "single-point"
    MATRIX = "matrix"
    SURFACE = "surface"

    @classmethod
    def parse(cls, text: str) -> "ComputationSetting":
        key = text.strip().lower().replace("_", "-")
        aliases = {"single": cls.SINGLE_POINT, "point": cls.SINGLE_POINT, "1": cls.SINGLE_POINT,
                   "2": cls.MATRIX, "3": cls.SURFACE}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            choices = ", ".join(s.value for s in cls)
            raise ConfigurationError(f"unknown setting {text!r} (choose from {choices})") from None


_INPUT_FOR_SETTING = {
    ComputationSetting.SINGLE_POINT: SinglePoint,
    ComputationSetting.MATRIX: Matrix,
    ComputationSetting.SURFACE: SurfaceRaster,
}


@dataclass(frozen=True)
class UValueMap:
    grid: Grid
    setting: ComputationSetting
    film_corrected: bool = False

    @property
    def shape(self) -> tuple[int, int]:
        return self.grid.shape


@dataclass(frozen=True)
class MapStats:
    min: float
    max: float
    mean: float
    count: int


@dataclass(frozen=True)
class QualityReport:
    delta_t_across_wall: float
    wind_ok: bool
    delta_t_ok: bool
    messages: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.wind_ok and self.delta_t_ok


def _masked_ratio(q: np.ndarray, dt: np.ndarray, mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    degenerate = (~mask) & (dt == 0)
    mask = mask | degenerate
    u = np.divide(q, dt, out=np.full(q.shape, np.nan), where=~mask)
    n = int(degenerate.sum())
    if n:
        log.warning("masked %d pixel(s) with zero temperature difference", n)
    return u, mask


def compute_umap(
    t_s_out: TemperatureRaster,
    indoor: IndoorTemperatureInput,
    ambient: AmbientConditions,
    geometry: WallGeometry,
    mesh: MeshSpec,
    setting: ComputationSetting,
    apply_films: bool = False,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
    matrix_expansion: str = "block",
    table: AirPropertyTable | None = None,
) -> UValueMap:
    """U-value of every mesh pixel under one indoor-temperature setting.

    The exterior flux is evaluated per pixel (film temperature, air
    properties, Ra, Nu and h_ext all follow the pixel's own surface
    temperature). SURFACE divides by the surface-to-surface difference; the
    two air settings divide by indoor air minus outdoor air. Pixels whose
    denominator is zero are masked rather than raising.
    """
    expected = _INPUT_FOR_SETTING[setting]
    if not isinstance(indoor, expected):
        raise ConfigurationError(
            f"setting {setting.value!r} requires a {expected.__name__} indoor input, "
            f"got {type(indoor).__name__}"
        )
    if apply_films and setting is not ComputationSetting.SURFACE:
        raise ConfigurationError(
            "film correction only applies to the surface setting; air-referenced "
            "U-values already span the air films"
        )

    outdoor = resample_to_mesh(t_s_out, mesh)
    inside = indoor_field(indoor, mesh, matrix_expansion)
    mask = outdoor.mask | inside.mask

    ts_out = outdoor.filled(ambient.t_out)
    flux = exterior_flux(ts_out, ambient.t_out, ambient.emissivity, geometry, constants, table)
    q = np.where(mask, np.nan, flux.q_total)

    if setting is ComputationSetting.SURFACE:
        dt = inside.filled(np.nan) - ts_out
    else:
        dt = inside.filled(np.nan) - ambient.t_out
    u, mask = _masked_ratio(q, dt, mask)

    if apply_films:
        nonpositive = (~mask) & (u <= 0)
        if np.any(nonpositive):
            log.warning("masked %d pixel(s) with non-positive wall U before film correction",
                        int(nonpositive.sum()))
            mask = mask | nonpositive
        with np.errstate(divide="ignore", invalid="ignore"):
            u = np.where(mask, np.nan, 1.0 / (1.0 / u + constants.r_film_in + constants.r_film_out))

    if not np.any(~mask):
        raise EmptyMapError("every pixel of the U-value map is masked")
    return UValueMap(Grid(u, mask), setting, bool(apply_films))


def average_umaps(maps: Sequence[UValueMap]) -> UValueMap:
    """Pixelwise mean of maps computed under the same setting (e.g. one per capture group)."""
    if len(maps) == 0:
        raise ValidationError("need at least one map to average")
    first = maps[0]
    for m in maps[1:]:
        if m.setting is not first.setting:
            raise ValidationError(f"cannot average {m.setting.value} with {first.setting.value} maps")
        if m.film_corrected != first.film_corrected:
            raise ValidationError("cannot average film-corrected with uncorrected maps")
    grid = average_rasters([m.grid for m in maps])
    return UValueMap(grid, first.setting, first.film_corrected)


def _grid_of(m) -> Grid:
    return m.grid if isinstance(m, UValueMap) else m


def difference_map(a: UValueMap | Grid, b: UValueMap | Grid) -> Grid:
    """Signed per-pixel ``a - b``; masked wherever either input is."""
    ga, gb = _grid_of(a), _grid_of(b)
    if ga.shape != gb.shape:
        raise ValidationError(f"shape mismatch: {ga.shape} vs {gb.shape}")
    mask = ga.mask | gb.mask
    diff = np.where(mask, np.nan, ga.filled(0.0) - gb.filled(0.0))
    return Grid(diff, mask)


def map_stats(m: UValueMap | Grid) -> MapStats:
    grid = _grid_of(m)
    vals = grid.values[grid.valid]
    if vals.size == 0:
        raise ValidationError("map has no unmasked pixels")
    mean = float(np.mean(vals))
    lo, hi = float(vals.min()), float(vals.max())
    # Guard the invariant against last-ulp rounding on near-constant maps.
    mean = min(max(mean, lo), hi)
    return MapStats(min=lo, max=hi, mean=mean, count=int(vals.size))


def hfm_deviation(map_mean: float, hfm_value: float) -> float:
    """Relative deviation of a map average from a heat-flux-meter U-value."""
    if not np.isfinite(hfm_value) or hfm_value <= 0:
        raise ValidationError(f"HFM U-value must be > 0, got {hfm_value}")
    return abs(map_mean - hfm_value) / hfm_value


def validate_conditions(
    ambient: AmbientConditions, t_s_in_mean: float, t_s_out_mean: float
) -> QualityReport:
    """Annotate whether the measurement conditions support a steady-state U-value."""
    dt = abs(t_s_in_mean - t_s_out_mean)
    delta_t_ok = dt >= MIN_DELTA_T_ACROSS_WALL
    wind_ok = ambient.wind_speed < MAX_WIND_SPEED
    messages = []
    if delta_t_ok:
        messages.append(f"temperature difference across wall {dt:.2f} K >= {MIN_DELTA_T_ACROSS_WALL:g} K")
    else:
        messages.append(
            f"temperature difference across wall {dt:.2f} K is below {MIN_DELTA_T_ACROSS_WALL:g} K"
        )
    if wind_ok:
        messages.append(f"wind speed {ambient.wind_speed:g} m/s < {MAX_WIND_SPEED:g} m/s")
    else:
        messages.append(
            f"wind speed {ambient.wind_speed:g} m/s is not below {MAX_WIND_SPEED:g} m/s; "
            "natural-convection correlation does not apply"
        )
    return QualityReport(dt, wind_ok, delta_t_ok, messages)
