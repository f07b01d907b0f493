"""Finite-dimensional quantum filtering for coherent-state input fields.

Simulates quadrature and photon-counting measurement records of an open
quantum system driven by a coherent field, propagates the corresponding
stochastic master equations (normalized and unnormalized), integrates the
averaged master equation, and cross-checks against classical particle
filtering on scalar benchmarks.
"""

from .classical import (
    ClassicalModel,
    KalmanState,
    ParticleEnsemble,
    bistable_double_well,
    classical_innovations,
    init_ensemble,
    kalman_bucy_step,
    linear_model,
    particle_step,
    posterior,
    riccati_steady_state,
    simulate_pair,
    systematic_resample,
)
from .config import ConfigError, RunConfig, parse_config, parse_config_dict
from .ensemble import EnsembleConfig, EnsembleReport, martingale_test, mix_seed, run_ensemble
from .ito import (
    IncrementPolynomial,
    coherent_expectation,
    girsanov_coefficients,
    ito_product,
    ito_product_many,
    langevin_increment,
    nondemolition_residual,
    output_increments,
    verify_generator,
    zakai_expansion,
)
from .linalg import (
    DimensionMismatchError,
    SpectralDecomposition,
    anticommutator,
    commutator,
    dagger,
    expectation,
    is_hermitian,
    is_unitary,
    joint_spectral_projections,
    max_norm,
    purity,
    trace_distance,
    validate_density,
)
from .master import (
    DegenerateSteadyStateError,
    MasterTrajectory,
    StepSizeError,
    TimeGrid,
    integrate_master,
    liouvillian_matrix,
    steady_state,
)
from .model import (
    CoherentInput,
    HPModel,
    ModulatedOperators,
    adjoint_generator,
    evans_hudson,
    heisenberg_generator,
    lindblad_adjoint,
    lindblad_heisenberg,
    modulated_coupling,
    modulated_hamiltonian,
    modulated_operators,
)
from .qprob import MeasurementAlgebra, bayes_conditional, conditional_expectation, in_commutant
from .trajectory import (
    COUNTING,
    FilterState,
    InnovationsPath,
    JumpRateError,
    KINDS,
    MeasurementRecord,
    QUADRATURE,
    TraceUnderflowError,
    count_filter_step,
    filter_record,
    innovations,
    quad_filter_step,
    simulate_record,
    zakai_log_norm_increment,
    zakai_step,
)

__version__ = "0.1.0"
