"""Static-hover analysis and simulation for multi-rotor vehicles with tiltable propellers."""

from .platform import (
    ControlInput,
    DualTilt,
    FixedTilt,
    Platform,
    Propeller,
    RadialTilt,
    body_wrench,
    freeze_tilts,
    thrust_direction,
    thrust_vectors,
    with_mass,
    with_rates,
    with_u_max,
)
from .allocation import (
    AllocationMatrix,
    fixed_allocation,
    full_jacobian,
    moment_nullspace,
    numeric_rank,
    reduced_allocation,
    vector_allocation,
)
from .wrench_sets import (
    CannotLiftWeightError,
    DirectionGrid,
    SampledConvexSet,
    best_plane,
    force_set_at_hover,
    moment_set_at_hover,
    odl,
    planar_lift,
)
from .config import ConfigError, load_platform, serialize, to_platform
from .hover import (
    Classification,
    HoverSolution,
    can_statically_hover,
    classify,
    hover_orientation_set,
    is_csh,
    orientation_from_angles,
    solve_hover,
)
from .local_hover import (
    MomentZonotope,
    RateBox,
    calibrate_lhi,
    fixed_orientation_sustain_check,
    lhi,
    lhi_map,
    local_moment_zonotope,
    rank_equivalence_check,
)
from .local_hover import lhi_at_orientation, local_moment_set
from .presets import load_preset, preset_names
from .simulation import (
    ControllerGains,
    ExperimentResult,
    HoverInfeasibleError,
    RigidBodyState,
    SimulationDivergedError,
    attitude_drift,
    force_orientation_experiment,
    hold_experiment,
    hover_state,
    moment_step_experiment,
    rest_state,
    step,
    wrench_rate_controller,
)

__version__ = "0.1.0"

__all__ = [
    "AllocationMatrix",
    "CannotLiftWeightError",
    "Classification",
    "ConfigError",
    "ControlInput",
    "ControllerGains",
    "DirectionGrid",
    "DualTilt",
    "ExperimentResult",
    "FixedTilt",
    "HoverInfeasibleError",
    "HoverSolution",
    "MomentZonotope",
    "Platform",
    "Propeller",
    "RadialTilt",
    "RateBox",
    "RigidBodyState",
    "SampledConvexSet",
    "SimulationDivergedError",
    "attitude_drift",
    "best_plane",
    "body_wrench",
    "calibrate_lhi",
    "can_statically_hover",
    "classify",
    "fixed_allocation",
    "fixed_orientation_sustain_check",
    "force_orientation_experiment",
    "force_set_at_hover",
    "freeze_tilts",
    "full_jacobian",
    "hold_experiment",
    "hover_orientation_set",
    "hover_state",
    "is_csh",
    "lhi",
    "lhi_at_orientation",
    "lhi_map",
    "load_platform",
    "load_preset",
    "local_moment_set",
    "local_moment_zonotope",
    "moment_nullspace",
    "moment_set_at_hover",
    "moment_step_experiment",
    "numeric_rank",
    "odl",
    "orientation_from_angles",
    "planar_lift",
    "preset_names",
    "rank_equivalence_check",
    "reduced_allocation",
    "rest_state",
    "serialize",
    "solve_hover",
    "step",
    "thrust_direction",
    "thrust_vectors",
    "to_platform",
    "vector_allocation",
    "with_mass",
    "with_rates",
    "with_u_max",
    "wrench_rate_controller",
    "__version__",
]
