"""Pixel-level in-situ U-value maps of building walls from paired IR rasters."""

from .errors import (
    ConfigurationError,
    DegenerateDenominatorError,
    EmptyMapError,
    PropertyRangeError,
    RasterParseError,
    SceneGenerationError,
    UMapError,
    ValidationError,
)
from .physics import (
    DEFAULT_CONSTANTS,
    AirProperties,
    AirPropertyTable,
    AmbientConditions,
    FilmState,
    FluxComponents,
    PhysicalConstants,
    WallGeometry,
    air_properties_at,
    exterior_convective_coefficient,
    exterior_flux,
    film_state,
    film_temperature,
    nusselt_number,
    rayleigh_number,
    surface_fluxes,
    total_u_with_films,
    u_value_air_referenced,
    u_value_surface_referenced,
)
from .raster import (
    Grid,
    Matrix,
    MeshSpec,
    SensorMatrix,
    SinglePoint,
    SurfaceRaster,
    TemperatureRaster,
    average_rasters,
    indoor_field,
    resample_to_mesh,
)
from .pipeline import (
    ComputationSetting,
    MapStats,
    QualityReport,
    UValueMap,
    average_umaps,
    compute_umap,
    difference_map,
    hfm_deviation,
    map_stats,
    validate_conditions,
)
from .synth import (
    Scene,
    SyntheticWallSpec,
    Uniform,
    VerticallyStratified,
    generate_scene,
    stratified_air_scene,
)
from .gridio import load_raster, load_umap
from .heatmap import HeatmapStyle, emit_heatmap

__version__ = "0.1.0"
