"""Synthetic scene directories: grid files plus a key-value manifest of the wall parameters."""

from __future__ import annotations

import os
import shutil
import tempfile
from pathlib import Path

from .errors import ValidationError
from .gridio import (
    CELSIUS_OFFSET,
    format_grid,
    format_kv,
    format_raster,
    format_umap,
    parse_kv,
    read_kv,
)
from .physics import AmbientConditions, WallGeometry
from .raster import Grid, MeshSpec
from .synth import Scene, SyntheticWallSpec, Uniform, VerticallyStratified

MANIFEST = "manifest.txt"
SCENE_FILES = {
    "t_s_out": "t_s_out.txt",
    "t_s_in": "t_s_in.txt",
    "indoor_air": "indoor_air.txt",
    "u_truth": "u_truth.txt",
    "sensor_matrix": "sensor_matrix.txt",
}


def _float(kv, key, default=None):
    if key not in kv:
        if default is None:
            raise ValidationError(f"manifest is missing {key!r}")
        return default
    try:
        return float(kv[key])
    except ValueError:
        raise ValidationError(f"manifest value for {key!r} is not a number: {kv[key]!r}") from None


def spec_from_kv(kv: dict) -> SyntheticWallSpec:
    """Build a spec from manifest keys; temperatures are kelvin unless ``unit=C``."""
    unit = kv.get("unit", "K")
    if unit not in ("K", "C"):
        raise ValidationError(f"manifest unit must be K or C, got {unit!r}")
    off = CELSIUS_OFFSET if unit == "C" else 0.0

    def temp(key, default=None):
        return _float(kv, key, None if default is None else default - off) + off

    mesh = MeshSpec(int(_float(kv, "rows", 30)), int(_float(kv, "cols", 40)))
    t_in = temp("t_in", 294.15)
    ambient = AmbientConditions(
        t_in=t_in,
        t_out=temp("t_out", 278.15),
        emissivity=_float(kv, "emissivity", 0.95),
        wind_speed=_float(kv, "wind_speed", 0.0),
        relative_humidity=_float(kv, "relative_humidity", 0.5),
    )
    geometry = WallGeometry(_float(kv, "height", 2.4), _float(kv, "width", 3.2))
    studs = kv.get("stud_columns", "").strip()
    stud_columns = tuple(int(s) for s in studs.split(",") if s.strip()) if studs else ()
    profile_name = kv.get("profile", "uniform")
    if profile_name == "uniform":
        profile = Uniform(t_in)
    elif profile_name == "stratified":
        profile = VerticallyStratified(temp("t_bottom"), temp("t_top"))
    else:
        raise ValidationError(f"unknown indoor air profile {profile_name!r}")
    u_ins = _float(kv, "u_insulation", 1.5)
    return SyntheticWallSpec(
        mesh=mesh,
        u_insulation=u_ins,
        u_stud=_float(kv, "u_stud", u_ins),
        stud_columns=stud_columns,
        ambient=ambient,
        geometry=geometry,
        indoor_air_profile=profile,
        t_s_out_offset=_float(kv, "t_s_out_offset", 5.0),
        perturbation=_float(kv, "perturbation", 0.0),
    )


def spec_to_kv(spec: SyntheticWallSpec, scene: Scene | None = None) -> dict:
    a, g = spec.ambient, spec.geometry
    kv = {
        "rows": spec.mesh.rows,
        "cols": spec.mesh.cols,
        "u_insulation": float(spec.u_insulation),
        "u_stud": float(spec.u_stud),
        "stud_columns": ",".join(str(c) for c in spec.stud_columns),
        "unit": "K",
        "t_in": float(a.t_in),
        "t_out": float(a.t_out),
        "emissivity": float(a.emissivity),
        "wind_speed": float(a.wind_speed),
        "relative_humidity": float(a.relative_humidity),
        "height": float(g.height),
        "width": float(g.width),
        "t_s_out_offset": float(spec.t_s_out_offset),
        "perturbation": float(spec.perturbation),
    }
    profile = spec.indoor_air_profile
    if isinstance(profile, VerticallyStratified):
        kv.update(profile="stratified", t_bottom=float(profile.t_bottom), t_top=float(profile.t_top))
    else:
        kv["profile"] = "uniform"
    if scene is not None:
        kv["sensor_point"] = scene.mid_height_air()
    return kv


def load_spec(path) -> SyntheticWallSpec:
    return spec_from_kv(read_kv(path))


def parse_spec(text: str) -> SyntheticWallSpec:
    return spec_from_kv(parse_kv(text))


def write_scene(scene: Scene, spec: SyntheticWallSpec, directory) -> Path:
    """Write every scene grid and the manifest into ``directory`` atomically.

    Files are staged in a sibling temporary directory and renamed into place,
    so ``directory`` either appears complete or not at all. An existing
    non-empty ``directory`` is refused.
    """
    directory = Path(directory)
    if directory.exists() and (not directory.is_dir() or any(directory.iterdir())):
        raise FileExistsError(f"refusing to overwrite non-empty {directory}")
    parent = directory.parent if str(directory.parent) else Path(".")
    staging = Path(tempfile.mkdtemp(prefix=f".{directory.name}.", dir=parent))
    try:
        m = scene.sensor_matrix()
        contents = {
            "t_s_out": format_raster(scene.t_s_out),
            "t_s_in": format_raster(scene.t_s_in),
            "indoor_air": format_raster(scene.indoor_air),
            "u_truth": format_umap(scene.u_truth),
            "sensor_matrix": format_grid(Grid(m.temperatures, None), "K"),
        }
        for key, text in contents.items():
            (staging / SCENE_FILES[key]).write_text(text)
        (staging / MANIFEST).write_text(format_kv(spec_to_kv(spec, scene)))
        os.chmod(staging, 0o755)
        os.replace(staging, directory)
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    return directory
