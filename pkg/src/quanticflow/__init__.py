"""Invariant theory of binary cubics and quartics meets their Hamiltonian flows."""

from .binary_forms import (
    BinaryForm,
    CubicCoeffs,
    InvariantSet,
    QuarticCoeffs,
    check_syzygy_cubic,
    check_syzygy_quartic,
    discriminant_cubic,
    evaluate,
    hessian_cubic,
    hessian_quartic,
    invariant_S,
    invariant_T,
    jacobian_cubic,
    jacobian_quartic,
    make_cubic,
    make_quartic,
    partial_p,
    partial_q,
    poisson_bracket,
)
from .covariant_dynamics import (
    EllipticParams,
    HamiltonianSpec,
    covariant_F,
    g_constants,
    quartic_disc_relation,
    verify_Fdot_is_minus_J,
    verify_scalar_odes,
    verify_vector_ode,
)
from .hamilton_flow import (
    DriftReport,
    FlowStatus,
    IntegratorConfig,
    PhaseState,
    Trajectory,
    drift_report,
    hamilton_rhs,
    integrate,
)
from .weierstrass import (
    LatticeClass,
    ShiftFit,
    WpValue,
    check_disc_relation_numeric,
    classify_lattice,
    fit_shift,
    real_period,
    wp_eval,
)

__all__ = [
    "BinaryForm",
    "CubicCoeffs",
    "InvariantSet",
    "QuarticCoeffs",
    "check_syzygy_cubic",
    "check_syzygy_quartic",
    "discriminant_cubic",
    "evaluate",
    "hessian_cubic",
    "hessian_quartic",
    "invariant_S",
    "invariant_T",
    "jacobian_cubic",
    "jacobian_quartic",
    "make_cubic",
    "make_quartic",
    "partial_p",
    "partial_q",
    "poisson_bracket",
    "EllipticParams",
    "HamiltonianSpec",
    "covariant_F",
    "g_constants",
    "quartic_disc_relation",
    "verify_Fdot_is_minus_J",
    "verify_scalar_odes",
    "verify_vector_ode",
    "DriftReport",
    "FlowStatus",
    "IntegratorConfig",
    "PhaseState",
    "Trajectory",
    "drift_report",
    "hamilton_rhs",
    "integrate",
    "LatticeClass",
    "ShiftFit",
    "WpValue",
    "check_disc_relation_numeric",
    "classify_lattice",
    "fit_shift",
    "real_period",
    "wp_eval",
]

__version__ = "0.1.0"
