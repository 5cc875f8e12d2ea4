"""Computational workbench for Weyl (CCR) algebras under Planck-constant rescaling.

States on the algebra are handled through their generating functionals;
positivity at a given scale parameter is decided by finite Gram kernels,
admissibility bounds come from the covariance spectrum, equilibrium states
carry a full modular calculus, scales beyond the admissible bound are handled
by spectral restriction, and every closed form can be cross-validated against
a truncated Fock-space simulator of the doubled (GNS) representation.
"""

from .errors import (
    ConfigInvalid,
    CovarianceBelowIdentity,
    CutoffTooSmall,
    DimensionMismatch,
    DomainViolation,
    InvalidMeasure,
    ModelMismatch,
    NonHermitian,
    NonPositiveAtom,
    NonPositiveBeta,
    NonPositiveHamiltonian,
    NonPositiveScale,
    NonUnitary,
    OutOfRange,
    OutsideStrip,
    ScaleOutOfRange,
    SpectralVariantHasNoVectors,
    SpectrumBelowOne,
    VectorOutsideSubspace,
    WeylscaleError,
)
from .spectral import (
    INF,
    Atom,
    Interval,
    OperatorSpec,
    ProjectionSpec,
    apply_function,
    inf_spectrum,
    is_trace_class_minus_identity,
    make_operator,
    op_norm,
    quadratic_form,
    spectral_distance,
    spectral_projection,
)
from .weyl import (
    SymplecticSpace,
    WeylWord,
    gamma_iso,
    inner,
    sigma,
    sigma_scaled,
    weyl_adjoint,
    weyl_multiply,
    word_distance,
)
from .states import (
    GramReport,
    GramViolationWitness,
    QuasiFreeState,
    RescaledFockState,
    StateFunctional,
    TraceState,
    check_sigma_h_positivity,
    evaluate_state,
    gram_matrix,
    h_max,
    quasi_free_functional,
    rescale_functional,
    scan_for_gram_violation,
    two_point_criterion,
)
from .fock import (
    GnsModel,
    MixtureMeasure,
    MixtureState,
    TruncatedFockOp,
    UnitaryMap,
    c_parameter,
    check_universal_invariance,
    commutant_residual,
    gns_annihilation,
    gns_commutant_weyl_operator,
    gns_creation,
    gns_expectation,
    gns_field_operator,
    gns_number_operator,
    gns_weyl_operator,
    h_of_c,
    is_quasi_equivalent_to_fock,
    one_particle_number_expectation,
    truncated_displacement,
    universally_invariant_functional,
    vacuum_expectation,
    weyl_relation_residual,
)
from .kms import (
    KmsModel,
    KmsWitnessReport,
    RescaledKmsModel,
    TwoPointReport,
    F_function,
    F_h_function,
    Phi_function,
    Phi_h_function,
    covariance_from_hamiltonian,
    default_time_grid,
    evolve_word,
    j_h_function,
    kms_boundary_residuals,
    kms_model,
    modular_operator,
    rescaled_kms_residuals,
    rescaled_modular,
    time_evolution,
    two_point_function,
)
from .restriction import (
    NonRegularFunctional,
    RestrictedModel,
    TraceLimitReport,
    check_trace_property,
    lambda_star,
    limit_to_trace_state,
    nonregular_extension,
    restricted_kms_residuals,
    restricted_model,
    spectral_correspondence_check,
    trace_state,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
