"""Finite-dimensional toolkit for unsharp quantum measurements."""

from .errors import (
    CapacityError,
    CoexistenceError,
    ConditioningError,
    ConsistencyError,
    DimensionError,
    ScenarioError,
    UnsharpError,
    ValidationError,
)
from .operator_core import (
    SpectralDecomposition,
    eig_hermitian,
    is_hermitian,
    is_positive_semidefinite,
    meet_projectors,
    sqrt_psd,
    tensor,
)
from .states_effects import (
    DensityOperator,
    Effect,
    EffectClass,
    born_probability,
    classify,
    complement,
    is_effect,
    is_real_in_state,
    is_regular,
    is_sharp,
)
from .observables import (
    GeneralizedMeasure,
    OutcomeSpace,
    ProjectiveMeasure,
    StochasticKernel,
    chsh_value,
    expectation_variance,
    first_moment,
    is_informationally_complete,
    joint_pvm,
    projectors_coexistent,
    pvm_from_observable,
    robertson_check,
    smear,
    unsharp_spin,
    validate_povm,
    validate_pvm,
)
from .coexistence import CoexistenceResult, SearchBudget, coexist_binary_povms
from .naimark import DilationResult, alternate_dilation, dilate, verify_dilation
from .simulator import (
    EnsembleConfig,
    MeasurementRecord,
    Trajectory,
    filter_pass,
    luders_update,
    run_sequences,
    sample_outcomes,
    sequential_measurement,
)

__version__ = "0.1.0"
