"""Exact and numeric arithmetic on theta-deformed planes, projector
trivialization and K_0 classes."""

from .algebra import (
    DEFAULT_TOL,
    AlgebraSignature,
    Element,
    MultiIndex,
    decay_check,
    degree,
    evaluate,
    hermitian_test,
    linear,
    monomial_mul,
    mul,
    mul_rewrite,
    scale,
    star,
    star_phase,
    truncate,
)
from .coefficients import (
    Angle,
    ExactScalar,
    GaussianRational,
    PhaseWord,
    ThetaMatrix,
    eval_scalar,
    format_theta,
    parse_theta,
    phase_mul,
    scalar_arith,
)
from .errors import (
    DiagonalizationError,
    DomainError,
    IdentityFailure,
    NotAProjectorError,
    ParseError,
    SignatureMismatchError,
    ThetaPlaneError,
    UnitarityCompletionError,
)
from .k0 import K0Class, equivalent, k0_arith, k0_class
from .matrices import (
    AlgMatrix,
    JetContext,
    direct_sum,
    evaluate_matrix,
    format_matrix,
    is_projector,
    is_unitary_mod,
    mat_adjoint,
    mat_mul,
    parse_matrix,
    projector_violation,
)
from .projectors import (
    RigidityReport,
    ScalarMatrix,
    TrivializationResult,
    assert_scalar_projector_poly,
    diagonalize_scalar_projector,
    gram_decomposition,
    make_test_projector,
    parse_report,
    scalar_part,
    solve_polynomial_projectors,
    top_gram_check,
    trivialize,
)
from .syntax import format_element, format_index, parse_element

__version__ = "0.1.0"
