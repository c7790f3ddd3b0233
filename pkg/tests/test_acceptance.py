"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line; ``conftest.py`` prints them all at the end
of the run. Run just this module with ``pytest tests/test_acceptance.py``.
"""

import contextlib
import subprocess
import sys
import time

import numpy as np
import pytest

from irtumap import (
    AmbientConditions,
    ComputationSetting,
    MeshSpec,
    PhysicalConstants,
    SinglePoint,
    SurfaceRaster,
    SyntheticWallSpec,
    TemperatureRaster,
    VerticallyStratified,
    WallGeometry,
    compute_umap,
    difference_map,
    generate_scene,
    hfm_deviation,
    nusselt_number,
    resample_to_mesh,
    stratified_air_scene,
    surface_fluxes,
    total_u_with_films,
    u_value_surface_referenced,
)

import oracles

RESULTS = []

# Worked pixel: t_s_out=283 K, t_out=278 K, t_s_in=292.5 K, eps=0.95, L=2.4 m.
# Frozen from oracles.pixel(), an independent pure-math evaluation of the chain.
WORKED_Q_TOTAL = 36.306498927560135
WORKED_U_WALL = 3.8217367292168563


@contextlib.contextmanager
def criterion(name):
    try:
        yield
    except BaseException as exc:
        RESULTS.append(f"FAIL  {name}: {exc}".splitlines()[0])
        raise
    RESULTS.append(f"PASS  {name}")


def test_nusselt_floor_and_monotonicity():
    with criterion("Nusselt floor 0.680625 at Ra=0 and monotone over [1, 1e12] (< 1 s)"):
        t0 = time.perf_counter()
        for pr in (0.5, 0.7, 1.0):
            assert nusselt_number(0.0, pr) == 0.680625
            sweep = nusselt_number(np.logspace(0, 12, 50), pr)
            assert np.all(np.diff(sweep) >= 0)
        assert time.perf_counter() - t0 < 1.0


def test_scalar_chain_worked_pixel():
    with criterion("scalar chain oracle for the worked pixel within 0.5% (< 1 s)"):
        t0 = time.perf_counter()
        o = oracles.pixel(283.0, 278.0, 0.95, 2.4)
        assert o["q"] == pytest.approx(WORKED_Q_TOTAL, rel=1e-12)
        amb = AmbientConditions(t_in=295.15, t_out=278.0, emissivity=0.95)
        m = compute_umap(TemperatureRaster(np.full((1, 1), 283.0), None),
                         SurfaceRaster(TemperatureRaster(np.full((1, 1), 292.5), None)),
                         amb, WallGeometry(2.4), MeshSpec(1, 1), ComputationSetting.SURFACE)
        u = m.grid.values[0, 0]
        assert u * (292.5 - 283.0) == pytest.approx(WORKED_Q_TOTAL, rel=5e-3)
        assert u == pytest.approx(WORKED_U_WALL, rel=5e-3)
        # Flux and ratio steps alone, with the h_ext = 1.343 quoted for this pixel.
        f = surface_fluxes(283.0, 278.0, 0.95, 1.343)
        assert f.q_total == pytest.approx(30.49, rel=5e-3)
        assert u_value_surface_referenced(f.q_total, 292.5, 283.0) == pytest.approx(3.209, rel=5e-3)
        assert time.perf_counter() - t0 < 1.0


@pytest.mark.parametrize("name, spec", [
    ("uniform", SyntheticWallSpec(u_insulation=1.5, u_stud=1.5)),
    ("3-stud", SyntheticWallSpec(u_insulation=1.2, u_stud=2.4, stud_columns=(10, 20, 30))),
    ("perturbed", SyntheticWallSpec(u_insulation=1.2, u_stud=2.4, stud_columns=(10, 20, 30), perturbation=2.0)),
])
def test_round_trip_recovery(name, spec):
    with criterion(f"round-trip recovery within 1e-9, {name} fixture (30x40 < 1 s)"):
        scene = generate_scene(spec)
        t0 = time.perf_counter()
        m = compute_umap(scene.t_s_out, SurfaceRaster(scene.t_s_in), spec.ambient, spec.geometry,
                         spec.mesh, ComputationSetting.SURFACE)
        elapsed = time.perf_counter() - t0
        truth = scene.u_truth.grid.values
        assert m.shape == (30, 40)
        assert np.max(np.abs(m.grid.values - truth) / truth) < 1e-9
        assert elapsed < 1.0


def test_stratification_sign_pattern():
    with criterion("stratification: Surface - SinglePoint >= 0 bottom third, <= 0 top third"):
        spec = SyntheticWallSpec(
            ambient=AmbientConditions(t_in=294.0, t_out=278.0),
            indoor_air_profile=VerticallyStratified(292.0, 296.0),
            u_insulation=1.2, u_stud=2.4, stud_columns=(10, 20, 30),
        )
        scene = stratified_air_scene(spec)
        sensor = scene.mid_height_air()
        assert sensor == pytest.approx(294.0)
        args = (spec.ambient, spec.geometry, spec.mesh)
        surf = compute_umap(scene.t_s_out, SurfaceRaster(scene.t_s_in), *args, ComputationSetting.SURFACE)
        single = compute_umap(scene.t_s_out, SinglePoint(sensor), *args, ComputationSetting.SINGLE_POINT)
        d = difference_map(surf, single).values
        third = spec.mesh.rows // 3
        bottom, top = d[:third], d[-third:]
        assert np.all(bottom >= 0) and np.any(bottom > 0)
        assert np.all(top <= 0) and np.any(top < 0)


@pytest.mark.parametrize("mean, expected", [(1.504, 0.065), (1.626, 0.011), (1.528, 0.050)])
def test_table1_hfm_deviation(mean, expected):
    with criterion(f"HFM deviation ({mean}, 1.609) = {expected:.1%} +/- 0.1 pp"):
        assert abs(hfm_deviation(mean, 1.609) - expected) <= 0.001


def test_series_network_consistency():
    with criterion("series films: equal flux through all three resistances within 1e-12 (100 draws)"):
        rng = np.random.default_rng(20240317)
        c = PhysicalConstants()
        u_walls = 5.0 - 4.9 * rng.random(100)  # (0.1, 5]
        dt_air = 16.0
        for u_wall in u_walls:
            u_total = total_u_with_films(u_wall, c)
            q = u_total * dt_air
            t_in = 294.15
            t_s_in = t_in - q * c.r_film_in
            t_s_out = t_s_in - q / u_wall
            t_out = t_s_out - q * c.r_film_out
            for flux in ((t_in - t_s_in) / c.r_film_in, (t_s_in - t_s_out) * u_wall, (t_s_out - t_out) / c.r_film_out):
                assert abs(flux - q) <= 1e-12 * q
            assert abs((t_in - t_out) - dt_air) <= 1e-12 * dt_air


def test_resampling_conserves_mean():
    with criterion("80x60 -> 40x30 resampling preserves the global mean within 1e-10"):
        rng = np.random.default_rng(7)
        for _ in range(25):
            vals = 270.0 + 30.0 * rng.random((60, 80))
            out = resample_to_mesh(TemperatureRaster(vals, None), MeshSpec(30, 40))
            assert abs(out.values.mean() - vals.mean()) <= 1e-10 * vals.mean()


def run_cli(*args):
    proc = subprocess.run([sys.executable, "-m", "irtumap", *map(str, args)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


def test_cli_end_to_end(tmp_path):
    with criterion("CLI synth -> compute -> diff gives zero difference, byte-identical reruns (< 5 s)"):
        spec = tmp_path / "wall.spec"
        spec.write_text("u_insulation=1.2\nu_stud=2.4\nstud_columns=10,20,30\nperturbation=1.0\n")
        t0 = time.perf_counter()
        outputs = []
        for run in ("a", "b"):
            scene = tmp_path / f"scene_{run}"
            umap = tmp_path / f"u_{run}.txt"
            diff = tmp_path / f"d_{run}.txt"
            run_cli("synth", "--spec", spec, "-o", scene)
            run_cli("compute", "--scene", scene, "--setting", "surface", "-o", umap)
            run_cli("diff", umap, scene / "u_truth.txt", "-o", diff)
            outputs.append((scene, umap, diff))
        elapsed = time.perf_counter() - t0

        (scene_a, umap_a, diff_a), (scene_b, umap_b, diff_b) = outputs
        lines = diff_a.read_text().split("\n")
        truth_lines = (scene_a / "u_truth.txt").read_text().split("\n")
        d = np.array([[float(x) for x in ln.split()] for ln in lines[1:] if ln])
        truth = np.array([[float(x) for x in ln.split()] for ln in truth_lines[1:] if ln])
        assert d.shape == (30, 40)
        assert np.all(np.abs(d) < 1e-9 * truth)
        for name in ("t_s_out.txt", "t_s_in.txt", "u_truth.txt", "manifest.txt"):
            assert (scene_a / name).read_bytes() == (scene_b / name).read_bytes()
        assert umap_a.read_bytes() == umap_b.read_bytes()
        assert diff_a.read_bytes() == diff_b.read_bytes()
        assert elapsed < 5.0
