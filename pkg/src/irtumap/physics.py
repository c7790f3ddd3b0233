"""Scalar heat-transfer physics for exterior-side IRT U-value measurement.

Every function accepts Python floats or numpy arrays and broadcasts; the
raster pipeline feeds whole meshes through the same code path that the
scalar tests exercise. Temperatures are kelvin throughout.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from importlib import resources
from typing import Union

import numpy as np

from .errors import DegenerateDenominatorError, PropertyRangeError, ValidationError

ArrayLike = Union[float, np.ndarray]

# 0.825**2 written as its exact decimal; the float square rounds one ulp low.
NUSSELT_FLOOR = 0.680625
AIR_TABLE_HEADER = "# dry-air 1atm v1"


@dataclass(frozen=True)
class PhysicalConstants:
    sigma: float = 5.67e-8
    g: float = 9.80665
    r_film_in: float = 0.12
    r_film_out: float = 0.03

    def __post_init__(self):
        for name in ("r_film_in", "r_film_out"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValidationError(f"{name} must be finite and >= 0, got {value}")


DEFAULT_CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class AirProperties:
    k: ArrayLike
    nu: ArrayLike
    pr: ArrayLike


@dataclass(frozen=True)
class AmbientConditions:
    t_in: float
    t_out: float
    emissivity: float = 0.95
    wind_speed: float = 0.0
    relative_humidity: float = 0.5

    def __post_init__(self):
        for name in ("t_in", "t_out"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValidationError(f"{name} must be a finite kelvin temperature > 0, got {value}")
        _check_emissivity(self.emissivity)
        if not np.isfinite(self.wind_speed) or self.wind_speed < 0:
            raise ValidationError(f"wind_speed must be >= 0, got {self.wind_speed}")
        if not 0.0 <= self.relative_humidity <= 1.0:
            raise ValidationError(
                f"relative_humidity must be a fraction in [0, 1], got {self.relative_humidity}"
            )


@dataclass(frozen=True)
class WallGeometry:
    height: float
    width: float = 1.0

    def __post_init__(self):
        for name in ("height", "width"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValidationError(f"wall {name} must be > 0, got {value}")


@dataclass(frozen=True)
class FilmState:
    t_m: ArrayLike
    beta: ArrayLike
    ra: ArrayLike
    nu_number: ArrayLike
    h_ext: ArrayLike


@dataclass(frozen=True)
class FluxComponents:
    q_r: ArrayLike
    q_c: ArrayLike
    q_total: ArrayLike


class AirPropertyTable:
    """Piecewise-linear dry-air property table, immutable after load."""

    def __init__(self, t, k, nu, pr):
        t = np.asarray(t, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise ValidationError("air table needs at least two nodes")
        if np.any(np.diff(t) <= 0):
            raise ValidationError("air table temperatures must be strictly increasing")
        columns = [np.asarray(c, dtype=float) for c in (k, nu, pr)]
        for c in columns:
            if c.shape != t.shape or not np.all(np.isfinite(c)) or np.any(c <= 0):
                raise ValidationError("air table properties must be positive and finite")
        for arr in (t, *columns):
            arr.setflags(write=False)
        self.t = t
        self.k, self.nu, self.pr = columns

    @classmethod
    def from_text(cls, text: str, source: str = "<table>") -> "AirPropertyTable":
        lines = text.splitlines()
        if not lines or lines[0].strip() != AIR_TABLE_HEADER:
            raise ValidationError(f"{source}: expected header {AIR_TABLE_HEADER!r}")
        rows = []
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise ValidationError(f"{source}: line {lineno}: expected T_K,k,nu,Pr")
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise ValidationError(f"{source}: line {lineno}: {exc}") from None
        data = np.array(rows)
        return cls(data[:, 0], data[:, 1], data[:, 2], data[:, 3])

    @property
    def t_min(self) -> float:
        return float(self.t[0])

    @property
    def t_max(self) -> float:
        return float(self.t[-1])

    def at(self, t_m: ArrayLike) -> AirProperties:
        t_m = np.asarray(t_m, dtype=float)
        if not np.all(np.isfinite(t_m)):
            raise ValidationError("film temperature must be finite")
        lo, hi = np.min(t_m), np.max(t_m)
        if lo < self.t_min:
            raise PropertyRangeError(
                f"film temperature {lo:.3f} K below table minimum {self.t_min:g} K"
            )
        if hi > self.t_max:
            raise PropertyRangeError(
                f"film temperature {hi:.3f} K above table maximum {self.t_max:g} K"
            )
        k = np.interp(t_m, self.t, self.k)
        nu = np.interp(t_m, self.t, self.nu)
        pr = np.interp(t_m, self.t, self.pr)
        if t_m.ndim == 0:
            return AirProperties(float(k), float(nu), float(pr))
        return AirProperties(k, nu, pr)


@functools.lru_cache(maxsize=None)
def default_air_table() -> AirPropertyTable:
    text = resources.files("irtumap").joinpath("data/dry_air_1atm_v1.csv").read_text()
    return AirPropertyTable.from_text(text, source="dry_air_1atm_v1.csv")


def air_properties_at(t_m: ArrayLike, table: AirPropertyTable | None = None) -> AirProperties:
    """Thermal conductivity, kinematic viscosity and Prandtl number of dry air at 1 atm."""
    return (table or default_air_table()).at(t_m)


def _check_positive_temperature(value, name):
    value = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(value)):
        raise ValidationError(f"{name} must be finite")
    if np.any(value <= 0):
        raise ValidationError(f"{name} must be > 0 K")
    return value


def _check_emissivity(emissivity):
    if not (np.isfinite(emissivity) and 0.0 < emissivity <= 1.0):
        raise ValidationError(f"emissivity must lie in (0, 1], got {emissivity}")


def _as_output(x):
    return float(x) if np.ndim(x) == 0 else x


def film_temperature(t_out: ArrayLike, t_s_out: ArrayLike) -> ArrayLike:
    t_out = _check_positive_temperature(t_out, "t_out")
    t_s_out = _check_positive_temperature(t_s_out, "t_s_out")
    return _as_output((t_out + t_s_out) / 2.0)


def rayleigh_number(
    t_s_out: ArrayLike,
    t_out: ArrayLike,
    geometry: WallGeometry,
    props: AirProperties,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> ArrayLike:
    """Rayleigh number of the exterior boundary layer.

    Buoyancy magnitude only: the absolute surface-to-air difference is used so
    the result is non-negative for surfaces colder than the air as well.
    """
    t_m = film_temperature(t_out, t_s_out)
    beta = 1.0 / np.asarray(t_m)
    dt = np.abs(np.asarray(t_s_out, dtype=float) - np.asarray(t_out, dtype=float))
    L = geometry.height
    ra = constants.g * beta * dt * L**3 / np.asarray(props.nu) ** 2 * np.asarray(props.pr)
    return _as_output(ra)


def nusselt_number(ra: ArrayLike, pr: ArrayLike) -> ArrayLike:
    """Churchill-Chu correlation for natural convection on a vertical plate, all Ra."""
    ra = np.asarray(ra, dtype=float)
    pr = np.asarray(pr, dtype=float)
    if np.any(~np.isfinite(ra)) or np.any(ra < 0):
        raise ValidationError("Rayleigh number must be finite and >= 0")
    if np.any(~np.isfinite(pr)) or np.any(pr <= 0):
        raise ValidationError("Prandtl number must be > 0")
    shape = (1.0 + (0.492 / pr) ** (9.0 / 16.0)) ** (8.0 / 27.0)
    x = 0.387 * ra ** (1.0 / 6.0) / shape
    # (0.825 + x)**2 expanded so that Ra = 0 lands exactly on the floor value.
    return _as_output(NUSSELT_FLOOR + x * (2 * 0.825 + x))


def exterior_convective_coefficient(
    nu_number: ArrayLike, props: AirProperties, geometry: WallGeometry
) -> ArrayLike:
    nu_number = np.asarray(nu_number, dtype=float)
    k = np.asarray(props.k, dtype=float)
    if np.any(nu_number < 0) or np.any(k <= 0):
        raise ValidationError("Nusselt number must be >= 0 and conductivity > 0")
    return _as_output(nu_number * k / geometry.height)


def film_state(
    t_s_out: ArrayLike,
    t_out: ArrayLike,
    geometry: WallGeometry,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
    table: AirPropertyTable | None = None,
) -> FilmState:
    """Film temperature through h_ext for one surface/air pairing (or a mesh of them)."""
    t_m = film_temperature(t_out, t_s_out)
    props = air_properties_at(t_m, table)
    ra = rayleigh_number(t_s_out, t_out, geometry, props, constants)
    nu_number = nusselt_number(ra, props.pr)
    h_ext = exterior_convective_coefficient(nu_number, props, geometry)
    beta = _as_output(1.0 / np.asarray(t_m))
    return FilmState(t_m=t_m, beta=beta, ra=ra, nu_number=nu_number, h_ext=h_ext)


def surface_fluxes(
    t_s_out: ArrayLike,
    t_out: ArrayLike,
    emissivity: float,
    h_ext: ArrayLike,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> FluxComponents:
    """Radiative and convective flux leaving the exterior surface, W/m^2."""
    _check_emissivity(emissivity)
    t_s_out = _check_positive_temperature(t_s_out, "t_s_out")
    t_out = _check_positive_temperature(t_out, "t_out")
    h_ext = np.asarray(h_ext, dtype=float)
    q_r = emissivity * constants.sigma * (t_s_out**4 - t_out**4)
    q_c = h_ext * (t_s_out - t_out)
    return FluxComponents(q_r=_as_output(q_r), q_c=_as_output(q_c), q_total=_as_output(q_r + q_c))


def exterior_flux(
    t_s_out: ArrayLike,
    t_out: ArrayLike,
    emissivity: float,
    geometry: WallGeometry,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
    table: AirPropertyTable | None = None,
) -> FluxComponents:
    """Full chain from exterior surface temperature to flux components."""
    state = film_state(t_s_out, t_out, geometry, constants, table)
    return surface_fluxes(t_s_out, t_out, emissivity, state.h_ext, constants)


def _ratio(q, dt, what):
    dt = np.asarray(dt, dtype=float)
    if np.any(dt == 0):
        raise DegenerateDenominatorError(f"{what} temperature difference is zero")
    return _as_output(np.asarray(q, dtype=float) / dt)


def u_value_air_referenced(q_total: ArrayLike, t_in: ArrayLike, t_out: ArrayLike) -> ArrayLike:
    """Air-to-air U-value from exterior flux and the indoor/outdoor air temperatures."""
    return _ratio(q_total, np.asarray(t_in, dtype=float) - np.asarray(t_out, dtype=float), "air")


def u_value_surface_referenced(
    q_total: ArrayLike, t_s_in: ArrayLike, t_s_out: ArrayLike
) -> ArrayLike:
    """Wall-only conductance from exterior flux and the two surface temperatures."""
    return _ratio(
        q_total, np.asarray(t_s_in, dtype=float) - np.asarray(t_s_out, dtype=float), "surface"
    )


def total_u_with_films(u_wall: ArrayLike, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> ArrayLike:
    """Add the indoor and outdoor air-film resistances in series to a wall conductance."""
    u_wall = np.asarray(u_wall, dtype=float)
    if np.any(~np.isfinite(u_wall)) or np.any(u_wall <= 0):
        raise ValidationError("u_wall must be finite and > 0")
    return _as_output(1.0 / (1.0 / u_wall + constants.r_film_in + constants.r_film_out))
