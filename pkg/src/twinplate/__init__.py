"""twinplate: a desk-scale laboratory for two velocity-coupled clamped plates
with localized structural damping.

The package discretizes the coupled fourth-order system on the unit
interval (tensor rectangles supported at the operator level), assembles the
block generator together with the exact energy form, and measures the
quantities the model is known for: the energy dissipation identity, spectra
and their abscissa, resolvent norms along the imaginary axis with fitted
decay exponents, energy decay rates along trajectories, the equal-speed
instability, and the exponent table of the globally damped comparison model.
"""

from .abstract_modes import (
    AbstractConfig,
    ModeBlock,
    ThetaFit,
    abstract_resolvent_norm,
    mode_generator,
    theta_exponent_sweep,
)
from .damping import (
    DampingProfile,
    StructuralReport,
    gc_preset_1d,
    indicator_profile,
    smooth_bump_profile,
    validate_coercive,
    validate_structural,
    zero_profile,
)
from .errors import (
    AxisEigenvalueError,
    ConfigError,
    DenseCapError,
    InvalidDampingError,
    InvalidGridError,
    InvalidParameterError,
    InvalidSupportError,
    NotApplicableError,
    TwinplateError,
)
from .evolution import (
    DecayFit,
    EnergyTrace,
    default_initial_state,
    default_time_step,
    dissipation_identity_residual,
    equal_speed_split,
    evolve,
    fit_decay_rate,
    plate_energy,
    split_energies,
    telescoped_residual,
)
from .generator import (
    CoupledGenerator,
    EnergyForm,
    assemble_generator,
    dissipativity_check,
    join_state,
    split_state,
)
from .mesh import (
    DiscreteOperators,
    Grid,
    biharmonic,
    build_grid_1d,
    build_grid_2d,
    gradient_map,
    second_difference_map,
    weighted_laplacian,
)
from .resolvent import (
    FitResult,
    GevreyCheck,
    SweepResult,
    UniformCheck,
    fit_exponent,
    fit_exponent_points,
    gevrey_bound_check,
    resolved_frequency_cap,
    resolvent_norm,
    resolvent_norm_dense,
    sweep,
    uniform_bound_check,
)
from .spectral import SpectrumReport, axis_clearance, eigenvalues, spectral_abscissa

__version__ = "0.1.0"
