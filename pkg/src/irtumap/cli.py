"""Command-line entry point: ``irtumap <subcommand> ...``.

Exit status: 0 success, 1 validation/configuration error, 2 I/O or parse
error, 3 empty (fully masked) map.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import scene_io
from .errors import ConfigurationError, UMapError
from .gridio import (
    CELSIUS_OFFSET,
    AtomicOutputs,
    format_grid,
    format_kv,
    format_umap,
    load_grid,
    load_raster,
    load_umap,
    read_kv,
)
from .heatmap import HeatmapStyle, render_ppm
from .physics import AmbientConditions, PhysicalConstants, WallGeometry
from .pipeline import (
    ComputationSetting,
    average_umaps,
    compute_umap,
    difference_map,
    hfm_deviation,
    map_stats,
    validate_conditions,
)
from .raster import Matrix, MeshSpec, SensorMatrix, SinglePoint, SurfaceRaster
from .synth import VerticallyStratified, generate_scene, stratified_air_scene

log = logging.getLogger("irtumap")

# Keys accepted in a --config file and their flag equivalents.
CONFIG_KEYS = (
    "t_out", "t_in", "emissivity", "wind_speed", "relative_humidity", "height", "width",
    "mesh_rows", "mesh_cols", "setting", "apply_films", "r_film_in", "r_film_out", "unit",
    "matrix_expansion", "outdoor", "indoor_surface", "indoor_matrix", "indoor_point",
)

DEFAULTS = {
    "emissivity": "0.95",
    "wind_speed": "0",
    "relative_humidity": "0.5",
    "height": "2.4",
    "width": "1",
    "mesh_rows": "30",
    "mesh_cols": "40",
    "apply_films": "false",
    "r_film_in": "0.12",
    "r_film_out": "0.03",
    "unit": "K",
    "matrix_expansion": "block",
}


@dataclass
class RunConfig:
    ambient: AmbientConditions
    geometry: WallGeometry
    mesh: MeshSpec
    setting: Optional[ComputationSetting]
    apply_films: bool
    constants: PhysicalConstants
    unit: str
    matrix_expansion: str
    outdoor: Optional[str]
    indoor_surface: Optional[str]
    indoor_matrix: Optional[str]
    indoor_point: Optional[float]


def _to_bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"expected a boolean, got {text!r}")


def _to_float(key, text):
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{key} must be a number, got {text!r}") from None


class _Kelvin(float):
    """Scene-manifest temperature, exempt from the --unit conversion."""


def _scene_layer(directory) -> dict:
    d = Path(directory)
    kv = read_kv(d / scene_io.MANIFEST)
    if kv.get("unit", "K") != "K":
        raise ConfigurationError("scene manifests are written in kelvin")
    layer = {k: kv[k] for k in ("emissivity", "wind_speed", "relative_humidity", "height", "width") if k in kv}
    for k in ("t_out", "t_in"):
        if k in kv:
            layer[k] = _Kelvin(_to_float(k, kv[k]))
    if "rows" in kv:
        layer["mesh_rows"] = kv["rows"]
    if "cols" in kv:
        layer["mesh_cols"] = kv["cols"]
    layer["outdoor"] = str(d / scene_io.SCENE_FILES["t_s_out"])
    layer["_scene_surface"] = str(d / scene_io.SCENE_FILES["t_s_in"])
    layer["_scene_matrix"] = str(d / scene_io.SCENE_FILES["sensor_matrix"])
    if "sensor_point" in kv:
        layer["_scene_point"] = kv["sensor_point"]
    return layer


def resolve_config(args) -> RunConfig:
    """Merge defaults < scene manifest < config file < command-line flags."""
    merged = dict(DEFAULTS)
    if getattr(args, "scene", None):
        merged.update(_scene_layer(args.scene))
    if getattr(args, "config", None):
        kv = read_kv(args.config)
        unknown = sorted(set(kv) - set(CONFIG_KEYS))
        if unknown:
            raise ConfigurationError(f"unknown config key(s): {', '.join(unknown)}")
        merged.update(kv)
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value

    unit = merged["unit"]
    if unit not in ("K", "C"):
        raise ConfigurationError(f"unit must be K or C, got {unit!r}")
    offset = CELSIUS_OFFSET if unit == "C" else 0.0

    def temperature(key):
        value = merged.get(key)
        if value is None:
            return None
        if isinstance(value, _Kelvin):
            return float(value)
        return _to_float(key, value) + offset

    scene_point = merged.get("_scene_point")

    setting = ComputationSetting.parse(merged["setting"]) if merged.get("setting") else None

    explicit = [k for k in ("indoor_surface", "indoor_matrix", "indoor_point") if merged.get(k) is not None]
    if len(explicit) > 1:
        raise ConfigurationError(f"give only one indoor input, got {', '.join(explicit)}")
    indoor_surface = merged.get("indoor_surface")
    indoor_matrix = merged.get("indoor_matrix")
    indoor_point = temperature("indoor_point")
    if not explicit and getattr(args, "scene", None) and setting is not None:
        if setting is ComputationSetting.SURFACE:
            indoor_surface = merged["_scene_surface"]
        elif setting is ComputationSetting.MATRIX:
            indoor_matrix = merged["_scene_matrix"]
        elif scene_point is not None:
            indoor_point = _to_float("sensor_point", scene_point)

    t_out = temperature("t_out")
    if t_out is None:
        raise ConfigurationError("outdoor air temperature t_out is required")
    t_in = temperature("t_in")
    if t_in is None:
        t_in = indoor_point if indoor_point is not None else t_out

    ambient = AmbientConditions(
        t_in=t_in,
        t_out=t_out,
        emissivity=_to_float("emissivity", merged["emissivity"]),
        wind_speed=_to_float("wind_speed", merged["wind_speed"]),
        relative_humidity=_to_float("relative_humidity", merged["relative_humidity"]),
    )
    geometry = WallGeometry(_to_float("height", merged["height"]), _to_float("width", merged["width"]))
    mesh = MeshSpec(int(_to_float("mesh_rows", merged["mesh_rows"])),
                    int(_to_float("mesh_cols", merged["mesh_cols"])))
    r_in = _to_float("r_film_in", merged["r_film_in"])
    r_out = _to_float("r_film_out", merged["r_film_out"])
    if r_in <= 0 or r_out <= 0:
        raise ConfigurationError("film resistance overrides must be positive")
    return RunConfig(
        ambient=ambient,
        geometry=geometry,
        mesh=mesh,
        setting=setting,
        apply_films=_to_bool(merged["apply_films"]),
        constants=PhysicalConstants(r_film_in=r_in, r_film_out=r_out),
        unit=unit,
        matrix_expansion=merged["matrix_expansion"],
        outdoor=merged.get("outdoor"),
        indoor_surface=indoor_surface,
        indoor_matrix=indoor_matrix,
        indoor_point=indoor_point,
    )


def _indoor_input(cfg: RunConfig):
    if cfg.indoor_surface is not None:
        return SurfaceRaster(load_raster(cfg.indoor_surface))
    if cfg.indoor_matrix is not None:
        r = load_raster(cfg.indoor_matrix)
        if np.any(r.mask):
            raise ConfigurationError("sensor matrix may not contain NA cells")
        return Matrix(SensorMatrix(r.values))
    if cfg.indoor_point is not None:
        return SinglePoint(cfg.indoor_point)
    if cfg.setting is ComputationSetting.SINGLE_POINT:
        return SinglePoint(cfg.ambient.t_in)
    raise ConfigurationError(
        "no indoor input: give --indoor-surface, --indoor-matrix or --indoor-point"
    )


def _style(args, diverging=False) -> HeatmapStyle:
    rng = tuple(args.range) if getattr(args, "range", None) else None
    kw = dict(range=rng, scale=args.scale)
    return HeatmapStyle.diverging(**kw) if diverging else HeatmapStyle(**kw)


def cmd_compute(args) -> int:
    cfg = resolve_config(args)
    if cfg.setting is None:
        raise ConfigurationError("--setting is required")
    if cfg.outdoor is None:
        raise ConfigurationError("--outdoor raster is required")
    umap = compute_umap(
        load_raster(cfg.outdoor), _indoor_input(cfg), cfg.ambient, cfg.geometry, cfg.mesh,
        cfg.setting, cfg.apply_films, cfg.constants, cfg.matrix_expansion,
    )
    with AtomicOutputs() as out:
        out.write_text(args.output, format_umap(umap))
        if args.heatmap:
            out.write_bytes(args.heatmap, render_ppm(umap.grid, _style(args)))
    return 0


def cmd_average(args) -> int:
    umap = average_umaps([load_umap(p) for p in args.maps])
    with AtomicOutputs() as out:
        out.write_text(args.output, format_umap(umap))
        if args.heatmap:
            out.write_bytes(args.heatmap, render_ppm(umap.grid, _style(args)))
    return 0


def cmd_diff(args) -> int:
    diff = difference_map(load_grid(args.a), load_grid(args.b))
    with AtomicOutputs() as out:
        out.write_text(args.output, format_grid(diff, "U"))
        if args.heatmap:
            out.write_bytes(args.heatmap, render_ppm(diff, _style(args, diverging=True)))
    return 0


def _emit_kv(pairs, output):
    text = format_kv(pairs)
    if output:
        with AtomicOutputs() as out:
            out.write_text(output, text)
    else:
        sys.stdout.write(text)


def cmd_stats(args) -> int:
    umap = load_umap(args.map)
    s = map_stats(umap)
    pairs = {
        "setting": umap.setting.value,
        "film_corrected": umap.film_corrected,
        "count": s.count,
        "min": s.min,
        "max": s.max,
        "mean": s.mean,
    }
    if args.hfm is not None:
        pairs["hfm_value"] = float(args.hfm)
        pairs["hfm_deviation"] = hfm_deviation(s.mean, args.hfm)
    _emit_kv(pairs, args.output)
    return 0


def _raster_mean(path):
    r = load_raster(path)
    return float(np.mean(r.values[r.valid]))


def cmd_validate(args) -> int:
    cfg = resolve_config(args)
    ts_out = args.t_s_out_mean
    ts_in = args.t_s_in_mean
    if ts_out is None:
        if cfg.outdoor is None:
            raise ConfigurationError("need --outdoor raster or --t-s-out-mean")
        ts_out = _raster_mean(cfg.outdoor)
    if ts_in is None:
        if cfg.indoor_surface is None:
            raise ConfigurationError("need --indoor-surface raster or --t-s-in-mean")
        ts_in = _raster_mean(cfg.indoor_surface)
    report = validate_conditions(cfg.ambient, ts_in, ts_out)
    pairs = {
        "delta_t_across_wall": report.delta_t_across_wall,
        "delta_t_ok": report.delta_t_ok,
        "wind_ok": report.wind_ok,
    }
    for i, msg in enumerate(report.messages, start=1):
        pairs[f"message{i}"] = msg
    _emit_kv(pairs, args.output)
    return 0


def cmd_synth(args) -> int:
    spec = scene_io.load_spec(args.spec) if args.spec else scene_io.parse_spec("")
    if isinstance(spec.indoor_air_profile, VerticallyStratified):
        scene = stratified_air_scene(spec)
    else:
        scene = generate_scene(spec)
    scene_io.write_scene(scene, spec, args.output)
    return 0


def _add_ambient_flags(p):
    g = p.add_argument_group("run configuration (overrides --config)")
    g.add_argument("--config", help="flat key=value configuration file")
    g.add_argument("--scene", help="synthetic scene directory supplying inputs and ambient values")
    g.add_argument("--t-out", dest="t_out", type=float, help="outdoor air temperature")
    g.add_argument("--t-in", dest="t_in", type=float, help="indoor air temperature")
    g.add_argument("--emissivity", type=float)
    g.add_argument("--wind-speed", dest="wind_speed", type=float, help="m/s")
    g.add_argument("--rh", dest="relative_humidity", type=float, help="relative humidity, fraction")
    g.add_argument("--height", type=float, help="wall height L, m")
    g.add_argument("--width", type=float, help="wall width, m")
    g.add_argument("--unit", choices=("K", "C"), help="unit of scalar temperatures given as flags/config")
    g.add_argument("--outdoor", help="exterior surface temperature raster")
    g.add_argument("--indoor-surface", dest="indoor_surface", help="interior surface temperature raster")


def _add_heatmap_flags(p):
    p.add_argument("--heatmap", help="also write a PPM heatmap to this path")
    p.add_argument("--scale", type=int, default=1, help="integer upscale factor for the heatmap")
    p.add_argument("--range", type=float, nargs=2, metavar=("MIN", "MAX"), help="fixed color range")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="irtumap", description="Pixel-level U-value maps from IR thermography")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="compute a U-value map under one setting")
    _add_ambient_flags(p)
    p.add_argument("--setting", help="single-point | matrix | surface")
    p.add_argument("--indoor-matrix", dest="indoor_matrix", help="sensor matrix grid file")
    p.add_argument("--indoor-point", dest="indoor_point", type=float, help="single indoor air reading")
    p.add_argument("--films", dest="apply_films", action="store_const", const="true",
                   help="add air-film resistances (surface setting only)")
    p.add_argument("--r-film-in", dest="r_film_in", type=float)
    p.add_argument("--r-film-out", dest="r_film_out", type=float)
    p.add_argument("--mesh-rows", dest="mesh_rows", type=int)
    p.add_argument("--mesh-cols", dest="mesh_cols", type=int)
    p.add_argument("--matrix-expansion", dest="matrix_expansion", choices=("block", "bilinear"))
    p.add_argument("-o", "--output", required=True)
    _add_heatmap_flags(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("average", help="average maps computed under the same setting")
    p.add_argument("maps", nargs="+")
    p.add_argument("-o", "--output", required=True)
    _add_heatmap_flags(p)
    p.set_defaults(func=cmd_average)

    p = sub.add_parser("diff", help="signed difference A - B of two maps")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("-o", "--output", required=True)
    _add_heatmap_flags(p)
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("stats", help="min/max/mean of a map, optionally versus an HFM value")
    p.add_argument("map")
    p.add_argument("--hfm", type=float, help="heat-flux-meter U-value, W/(m2 K)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("validate", help="check measurement conditions")
    _add_ambient_flags(p)
    p.add_argument("--t-s-out-mean", dest="t_s_out_mean", type=float, help="mean exterior surface temperature, K")
    p.add_argument("--t-s-in-mean", dest="t_s_in_mean", type=float, help="mean interior surface temperature, K")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("synth", help="generate a synthetic ground-truth scene directory")
    p.add_argument("--spec", help="key=value manifest of the synthetic wall")
    p.add_argument("-o", "--output", required=True, help="scene directory to create")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UMapError as exc:
        print(f"irtumap {args.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"irtumap {args.command}: I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
