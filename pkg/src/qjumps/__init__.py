"""Decoherence of a free 1-D particle in a spatially correlated
white-noise potential, computed three ways: a split-step master
equation for the density matrix, an orthogonal-jump unraveling of the
wavefunction, and explicit Schroedinger trajectories in sampled
potential realizations.  The three routes agree within Monte Carlo
error; the test suite enforces that agreement.
"""

from .backends import available_backends, get_backend
from .ensemble import (
    EnsembleResult,
    MixedInitialState,
    compare_routes,
    run_jump_ensemble,
    run_whitenoise_ensemble,
)
from .grids import PhysicalConstants, SpatialGrid, build_grid
from .master import MasterStepper, evolve_master, step_master
from .noise import (
    CorrelationKernel,
    NoiseModel,
    check_generator_functional,
    make_noise_model,
    sample_potential,
)
from .states import (
    DensityMatrix,
    MomentSet,
    WaveFunction,
    expectation,
    gaussian_packet,
    hermite_packet,
    hs_distance,
    inner_product,
    moments,
    normalize,
    pure_density,
    purity,
)
from .unravel import (
    DecompositionReport,
    JumpEvent,
    TrajectoryRecord,
    UnravelStepper,
    apply_jump,
    decompose_step,
    jump_rate,
    nonlinear_drift_step,
    run_trajectory,
    step_trajectory,
)

__version__ = "0.1.0"

__all__ = [
    "CorrelationKernel",
    "DecompositionReport",
    "DensityMatrix",
    "EnsembleResult",
    "JumpEvent",
    "MasterStepper",
    "MixedInitialState",
    "MomentSet",
    "NoiseModel",
    "PhysicalConstants",
    "SpatialGrid",
    "TrajectoryRecord",
    "UnravelStepper",
    "WaveFunction",
    "apply_jump",
    "available_backends",
    "build_grid",
    "check_generator_functional",
    "compare_routes",
    "decompose_step",
    "evolve_master",
    "expectation",
    "gaussian_packet",
    "get_backend",
    "hermite_packet",
    "hs_distance",
    "inner_product",
    "jump_rate",
    "make_noise_model",
    "moments",
    "nonlinear_drift_step",
    "normalize",
    "pure_density",
    "purity",
    "run_jump_ensemble",
    "run_trajectory",
    "run_whitenoise_ensemble",
    "sample_potential",
    "step_master",
    "step_trajectory",
]
