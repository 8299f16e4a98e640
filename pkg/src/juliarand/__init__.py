"""Pseudo-random points for invariant measures on quadratic Julia sets.

The pipeline: enumerate a ball cover from backward iterates of the
repelling fixed point, estimate the Hausdorff dimension, evaluate the
invariant density by transfer-operator iteration, draw random backward
meshes, select the mesh row minimizing the discretized conformal-equation
residual, and validate the winner through Birkhoff averages.
"""

from .dynamics import (
    QuadraticMap,
    derivative,
    forward,
    inverse_branches,
    orbit,
    orbit_derivative_modulus_product,
)
from .ergodic import (
    BUILTIN_TEST_FUNCTIONS,
    ExperimentConfig,
    ExperimentReport,
    TestFunction,
    TrialResult,
    birkhoff_average,
    reference_integral,
    run_experiment,
    trial_seed,
)
from .errors import (
    BracketError,
    ConvergenceError,
    DomainError,
    JuliaRandError,
    NonFiniteError,
    ResourceLimitError,
)
from .lattice import (
    BorelCover,
    Lattice,
    anchor_recovery_error,
    borel_centers,
    find_repelling_fixed_point,
    forward_window,
    make_lattice,
)
from .selector import (
    AdaptiveResult,
    ObjectiveParams,
    PseudoPoint,
    adaptive_select,
    indicator_a,
    indicator_ta,
    objective,
    opteval_compat,
    select_pseudorandom,
)
from .transfer import (
    DensityCache,
    DensityResult,
    DimensionEstimate,
    density,
    density_cache,
    estimate_dimension,
    transfer_iterate,
)

__version__ = "0.1.0"

__all__ = [
    "QuadraticMap",
    "forward",
    "derivative",
    "inverse_branches",
    "orbit",
    "orbit_derivative_modulus_product",
    "find_repelling_fixed_point",
    "BorelCover",
    "borel_centers",
    "anchor_recovery_error",
    "Lattice",
    "make_lattice",
    "forward_window",
    "transfer_iterate",
    "density",
    "DensityResult",
    "estimate_dimension",
    "DimensionEstimate",
    "density_cache",
    "DensityCache",
    "indicator_a",
    "indicator_ta",
    "ObjectiveParams",
    "PseudoPoint",
    "objective",
    "select_pseudorandom",
    "AdaptiveResult",
    "adaptive_select",
    "opteval_compat",
    "TestFunction",
    "BUILTIN_TEST_FUNCTIONS",
    "birkhoff_average",
    "reference_integral",
    "ExperimentConfig",
    "ExperimentReport",
    "TrialResult",
    "run_experiment",
    "trial_seed",
    "JuliaRandError",
    "DomainError",
    "NonFiniteError",
    "BracketError",
    "ConvergenceError",
    "ResourceLimitError",
    "__version__",
]
