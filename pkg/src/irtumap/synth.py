"""Ground-truth wall scenes for end-to-end verification.

A scene fixes a conductance field (insulation with stud columns) and an
exterior surface temperature field, runs the exterior flux chain, and sets
the indoor surface temperature so that the surface-referenced U-value
reproduces the prescribed conductance at every pixel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.optimize import brentq

from .errors import SceneGenerationError, ValidationError
from .physics import (
    DEFAULT_CONSTANTS,
    AmbientConditions,
    PhysicalConstants,
    WallGeometry,
    exterior_flux,
)
from .pipeline import ComputationSetting, UValueMap
from .raster import Grid, MeshSpec, SensorMatrix, TemperatureRaster, resample_to_mesh

# Indoor surfaces hotter than boiling water indicate an infeasible spec.
MAX_PLAUSIBLE_SURFACE_K = 373.15


@dataclass(frozen=True)
class Uniform:
    t: float


@dataclass(frozen=True)
class VerticallyStratified:
    t_bottom: float
    t_top: float


IndoorAirProfile = Union[Uniform, VerticallyStratified]


@dataclass(frozen=True)
class SyntheticWallSpec:
    mesh: MeshSpec = field(default_factory=MeshSpec)
    u_insulation: float = 1.5
    u_stud: float = 1.5
    stud_columns: tuple = ()
    ambient: AmbientConditions = field(default_factory=lambda: AmbientConditions(t_in=294.15, t_out=278.15))
    geometry: WallGeometry = field(default_factory=lambda: WallGeometry(height=2.4, width=3.2))
    indoor_air_profile: Optional[IndoorAirProfile] = None
    t_s_out_offset: float = 5.0
    perturbation: float = 0.0

    def __post_init__(self):
        if not (self.u_insulation > 0 and self.u_stud >= self.u_insulation):
            raise ValidationError(
                f"need u_stud >= u_insulation > 0, got u_stud={self.u_stud}, u_insulation={self.u_insulation}"
            )
        cols = tuple(int(c) for c in self.stud_columns)
        for c in cols:
            if not 0 <= c < self.mesh.cols:
                raise ValidationError(f"stud column {c} outside mesh of {self.mesh.cols} columns")
        object.__setattr__(self, "stud_columns", cols)
        if self.indoor_air_profile is None:
            object.__setattr__(self, "indoor_air_profile", Uniform(self.ambient.t_in))

    def conductance(self) -> np.ndarray:
        u = np.full(self.mesh.shape, float(self.u_insulation))
        if self.stud_columns:
            u[:, list(self.stud_columns)] = self.u_stud
        return u

    def indoor_air(self) -> np.ndarray:
        rows, cols = self.mesh.shape
        profile = self.indoor_air_profile
        if isinstance(profile, Uniform):
            return np.full((rows, cols), float(profile.t))
        frac = np.arange(rows) / (rows - 1) if rows > 1 else np.zeros(1)
        column = profile.t_bottom + (profile.t_top - profile.t_bottom) * frac
        return np.repeat(column[:, None], cols, axis=1)

    def default_t_s_out(self) -> np.ndarray:
        rows, cols = self.mesh.shape
        base = self.ambient.t_out + self.t_s_out_offset
        if self.perturbation == 0:
            return np.full((rows, cols), base)
        # Smooth diagonal ramp of peak-to-peak amplitude `perturbation`, zero mean.
        r = np.linspace(0.0, 1.0, rows)[:, None]
        c = np.linspace(0.0, 1.0, cols)[None, :]
        return base + self.perturbation * (0.5 * r + 0.5 * c - 0.5)


@dataclass(frozen=True)
class Scene:
    t_s_out: TemperatureRaster
    t_s_in: TemperatureRaster
    u_truth: UValueMap
    indoor_air: TemperatureRaster

    def sensor_matrix(self, rows: int = 4, cols: int = 4) -> SensorMatrix:
        """Block means of the indoor air field, as a sensor grid would sample it."""
        blocks = resample_to_mesh(self.indoor_air, MeshSpec(rows, cols))
        return SensorMatrix(blocks.values)

    def mid_height_air(self) -> float:
        """Indoor air temperature at half the wall height (the single sensor's position)."""
        col = self.indoor_air.values[:, 0]
        pos = (len(col) - 1) / 2.0
        return float(np.interp(pos, np.arange(len(col)), col))


def generate_scene(
    spec: SyntheticWallSpec,
    t_s_out: Optional[np.ndarray] = None,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> Scene:
    """Exterior/interior surface rasters consistent with ``spec``'s conductance field."""
    u_truth = spec.conductance()
    air = spec.indoor_air()
    ts_out = spec.default_t_s_out() if t_s_out is None else np.array(t_s_out, dtype=float)
    if ts_out.shape != spec.mesh.shape:
        raise SceneGenerationError(f"t_s_out shape {ts_out.shape} does not match mesh {spec.mesh.shape}")
    t_out = spec.ambient.t_out
    if not np.all(ts_out > t_out) or not np.all(ts_out < air):
        raise SceneGenerationError(
            "exterior surface temperatures must lie strictly between outdoor and indoor air"
        )
    flux = exterior_flux(ts_out, t_out, spec.ambient.emissivity, spec.geometry, constants)
    ts_in = ts_out + flux.q_total / u_truth
    if np.max(ts_in) > MAX_PLAUSIBLE_SURFACE_K:
        raise SceneGenerationError(
            f"implied indoor surface temperature {np.max(ts_in):.2f} K exceeds "
            f"{MAX_PLAUSIBLE_SURFACE_K} K; raise u_insulation or lower t_s_out_offset"
        )
    return Scene(
        t_s_out=TemperatureRaster(ts_out, None),
        t_s_in=TemperatureRaster(ts_in, None),
        u_truth=UValueMap(Grid(u_truth, None), ComputationSetting.SURFACE, False),
        indoor_air=TemperatureRaster(air, None),
    )


def stratified_air_scene(
    spec: SyntheticWallSpec, constants: PhysicalConstants = DEFAULT_CONSTANTS
) -> Scene:
    """Scene whose indoor air varies linearly from bottom row to top row.

    The exterior surface temperature of each pixel is solved so that the
    exterior flux equals ``U_truth * (T_air(row) - T_out)``. The
    surface-to-surface difference then equals the local air-to-air
    difference, so the surface setting and an air setting fed the true local
    air temperature agree exactly; any disagreement with a broadcast
    single-point reading comes only from the stratification. As a
    consequence the indoor surface sits above the local air temperature,
    which is acceptable for an oracle but not a physical wall.
    """
    profile = spec.indoor_air_profile
    if not isinstance(profile, VerticallyStratified):
        raise SceneGenerationError("stratified scene needs a VerticallyStratified indoor air profile")
    if profile.t_bottom > profile.t_top:
        raise SceneGenerationError("stratified scene expects colder air at the bottom (t_bottom <= t_top)")

    air = spec.indoor_air()
    u = spec.conductance()
    t_out = spec.ambient.t_out
    eps = spec.ambient.emissivity

    def q_of(ts):
        return exterior_flux(ts, t_out, eps, spec.geometry, constants).q_total

    solved = {}
    ts_out = np.empty(spec.mesh.shape)
    for idx in np.ndindex(*spec.mesh.shape):
        key = (air[idx], u[idx])
        if key not in solved:
            t_air, u_px = key
            if t_air <= t_out:
                raise SceneGenerationError("indoor air must be warmer than outdoor air")
            target = u_px * (t_air - t_out)
            f = lambda ts: q_of(ts) - target  # noqa: E731
            if f(t_air) <= 0:
                raise SceneGenerationError(
                    f"U={u_px} too large for the exterior heat-transfer coefficient at {t_air} K air"
                )
            solved[key] = brentq(f, t_out, t_air, xtol=1e-12, rtol=4 * np.finfo(float).eps)
        ts_out[idx] = solved[key]
    return generate_scene(spec, t_s_out=ts_out, constants=constants)
