"""Deterministic Gray-Scott reaction-diffusion engine and spot-analysis toolkit."""

from .errors import (
    ConfigError,
    DivergenceError,
    GridMismatchError,
    SnapshotCrcError,
    SnapshotError,
    SnapshotTruncatedError,
    SnapshotVersionError,
    SpotSimError,
    TrackTooShortError,
)
from .grid import Field, GridSpec, laplacian, total_mass
from .kinetics import (
    GrayScottParams,
    TailParams,
    WasteParams,
    homogeneous_fixed_points,
    react_gs,
    react_tail,
    react_waste,
)
from .integrator import InitSpec, Observer, SimState, init, run, step
from .perturb import (
    CataclysmSpec,
    EventApplier,
    EventSchedule,
    PipetteAction,
    ScheduledCataclysm,
    ScheduledPipette,
    apply_cataclysm,
    apply_pipette,
    clear_food_square,
)
from .analysis import (
    DetectConfig,
    HeredityStats,
    LineageEvent,
    Spot,
    SpotTracker,
    Track,
    TrackerConfig,
    Zone,
    detect_spots,
    heredity_stats,
    population_series,
    radial_profile,
    track_spots,
    velocity,
)

__version__ = "0.1.0"
