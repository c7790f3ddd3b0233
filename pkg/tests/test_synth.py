import numpy as np
import pytest

from irtumap import (
    AmbientConditions,
    ComputationSetting,
    MeshSpec,
    SceneGenerationError,
    SinglePoint,
    SurfaceRaster,
    Matrix,
    SyntheticWallSpec,
    Uniform,
    ValidationError,
    VerticallyStratified,
    WallGeometry,
    compute_umap,
    difference_map,
    generate_scene,
    map_stats,
    stratified_air_scene,
)

SURFACE = ComputationSetting.SURFACE


def recover(scene, spec, setting=SURFACE, indoor=None):
    indoor = indoor or SurfaceRaster(scene.t_s_in)
    return compute_umap(scene.t_s_out, indoor, spec.ambient, spec.geometry, spec.mesh, setting)


def rel_err(got, truth):
    return np.max(np.abs(got.grid.values - truth.grid.values) / truth.grid.values)


def test_uniform_round_trip():
    spec = SyntheticWallSpec(u_insulation=1.5, u_stud=1.5)
    scene = generate_scene(spec)
    assert np.all(scene.u_truth.grid.values == 1.5)
    assert rel_err(recover(scene, spec), scene.u_truth) < 1e-9


def test_equal_stud_contrast_gives_constant_indoor_surface():
    spec = SyntheticWallSpec(u_insulation=1.2, u_stud=1.2, stud_columns=(5, 6))
    scene = generate_scene(spec)
    assert np.ptp(scene.t_s_in.values) == 0.0


def test_stud_columns_construction_and_visibility():
    spec = SyntheticWallSpec(u_insulation=1.2, u_stud=2.4, stud_columns=(10, 20, 30))
    scene = generate_scene(spec)
    cols = np.nonzero(np.all(scene.u_truth.grid.values == 2.4, axis=0))[0]
    assert cols.tolist() == [10, 20, 30]
    assert np.all(np.delete(scene.u_truth.grid.values, [10, 20, 30], axis=1) == 1.2)
    recovered = recover(scene, spec)
    assert rel_err(recovered, scene.u_truth) < 1e-9
    s = map_stats(recovered)
    assert s.max - s.min >= 0.99 * (2.4 - 1.2)


def test_perturbed_exterior_round_trip():
    spec = SyntheticWallSpec(u_insulation=1.0, u_stud=2.0, stud_columns=(3, 17), perturbation=1.5)
    scene = generate_scene(spec)
    assert np.ptp(scene.t_s_out.values) == pytest.approx(1.5)
    assert rel_err(recover(scene, spec), scene.u_truth) < 1e-9


def test_spec_validation():
    with pytest.raises(ValidationError):
        SyntheticWallSpec(u_insulation=2.0, u_stud=1.0)
    with pytest.raises(ValidationError):
        SyntheticWallSpec(stud_columns=(40,))
    with pytest.raises(ValidationError):
        SyntheticWallSpec(u_insulation=0.0, u_stud=1.0)


def test_infeasible_scene():
    # Very low conductance forces an implausibly hot indoor surface.
    with pytest.raises(SceneGenerationError):
        generate_scene(SyntheticWallSpec(u_insulation=0.2, u_stud=0.2))
    # Exterior surface warmer than the indoor air.
    spec = SyntheticWallSpec(ambient=AmbientConditions(t_in=281.0, t_out=278.0))
    with pytest.raises(SceneGenerationError):
        generate_scene(spec)


def stratified_spec(t_bottom=292.0, t_top=296.0, **kw):
    return SyntheticWallSpec(
        ambient=AmbientConditions(t_in=294.0, t_out=278.0),
        indoor_air_profile=VerticallyStratified(t_bottom, t_top),
        **kw,
    )


def test_stratified_air_linear_in_row():
    scene = stratified_air_scene(stratified_spec())
    air = scene.indoor_air.values
    rows = air.shape[0]
    for r in range(rows):
        assert air[r, 0] == pytest.approx(292.0 + 4.0 * r / (rows - 1), abs=1e-12)
    assert scene.mid_height_air() == pytest.approx(294.0, abs=1e-12)


def test_stratified_round_trip_and_denominator_match():
    spec = stratified_spec(u_insulation=1.2, u_stud=2.0, stud_columns=(8, 24))
    scene = stratified_air_scene(spec)
    assert rel_err(recover(scene, spec), scene.u_truth) < 1e-9
    surface_dt = scene.t_s_in.values - scene.t_s_out.values
    air_dt = scene.indoor_air.values - spec.ambient.t_out
    assert np.allclose(surface_dt, air_dt, rtol=1e-9)


def test_stratified_zero_gradient_reduces_to_generate_scene():
    spec = stratified_spec(294.0, 294.0)
    strat = stratified_air_scene(spec)
    plain = generate_scene(spec, t_s_out=strat.t_s_out.values)
    assert strat.t_s_in == plain.t_s_in and strat.u_truth.grid == plain.u_truth.grid
    assert np.ptp(strat.t_s_out.values) == 0.0
    assert np.ptp(strat.indoor_air.values) == 0.0


def test_stratified_single_point_underestimates_bottom():
    spec = stratified_spec()
    scene = stratified_air_scene(spec)
    surf = recover(scene, spec)
    single = recover(scene, spec, ComputationSetting.SINGLE_POINT, SinglePoint(scene.mid_height_air()))
    d = difference_map(surf, single).values
    half = spec.mesh.rows // 2
    assert np.all(d[:half] >= 0) and np.all(d[half:] <= 0)
    assert np.all(d[0] > 0) and np.all(d[-1] < 0)


def test_matrix_setting_between_single_and_surface():
    spec = stratified_spec()
    scene = stratified_air_scene(spec)
    surf = recover(scene, spec)
    single = recover(scene, spec, ComputationSetting.SINGLE_POINT, SinglePoint(scene.mid_height_air()))
    matrix = recover(scene, spec, ComputationSetting.MATRIX, Matrix(scene.sensor_matrix()))
    err_single = np.abs(single.grid.values - surf.grid.values).mean()
    err_matrix = np.abs(matrix.grid.values - surf.grid.values).mean()
    assert err_matrix < err_single


def test_stratified_requires_profile():
    with pytest.raises(SceneGenerationError):
        stratified_air_scene(SyntheticWallSpec())
    with pytest.raises(SceneGenerationError):
        stratified_air_scene(stratified_spec(296.0, 292.0))


def test_uniform_profile_default():
    spec = SyntheticWallSpec(ambient=AmbientConditions(t_in=293.0, t_out=275.0))
    assert spec.indoor_air_profile == Uniform(293.0)
    assert np.all(generate_scene(spec).indoor_air.values == 293.0)


def test_small_mesh_and_geometry():
    spec = SyntheticWallSpec(mesh=MeshSpec(3, 4), geometry=WallGeometry(1.0), stud_columns=(1,), u_stud=3.0)
    scene = generate_scene(spec)
    assert scene.t_s_in.shape == (3, 4)
    assert rel_err(recover(scene, spec), scene.u_truth) < 1e-9
