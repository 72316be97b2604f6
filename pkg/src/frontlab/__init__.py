"""Numerical laboratory for 1D ignition-type reaction-diffusion fronts in
time-heterogeneous media."""

__version__ = "0.1.0"

from .nonlinearity import (  # noqa: F401
    DEFAULT_MODEL,
    ForcingComponent,
    ForcingSignal,
    HypothesisError,
    HypothesisReport,
    IgnitionNonlinearity,
    bistable_extension,
    evaluate,
    require_valid,
    validate_hypotheses,
)
from .homogeneous import (  # noqa: F401
    HomogeneousWave,
    ShootingError,
    solve_bistable_wave,
    solve_ignition_floor_wave,
)
from .pde import (  # noqa: F401
    ConfigError,
    Field,
    Grid1D,
    SolverConfig,
    WaveHistory,
    WindowError,
    default_dt,
    evolve,
    pde_residual,
    step,
)
from .tracking import (  # noqa: F401
    FrontTrace,
    ModifiedInterface,
    WaveProfileSnapshot,
    extract_profile,
    fit_exponential_tail,
    interface_location,
    modified_interface,
    speed_at_interface,
)
from .supersub import (  # noqa: F401
    GammaBridge,
    SqueezeConstants,
    build_gamma,
    derive_constants,
    envelope_residuals,
    initial_sandwich,
    tightest_shift,
)
from .experiments import (  # noqa: F401
    ExperimentReport,
    ExperimentSpec,
    run_average_speed,
    run_experiment,
    run_monotonicity_decay,
    run_recurrence,
    run_stability,
    run_uniqueness,
)
