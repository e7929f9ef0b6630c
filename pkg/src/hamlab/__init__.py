"""Homotopy analysis method versus (generalized) Taylor series on two model BVPs."""

from .series import (
    EXP_DECAY,
    EXP_GROWTH,
    Basis,
    BasisMismatch,
    OrderOutOfRange,
    TruncatedSeries,
    exp_decay,
    power_series,
)
from .ham import (
    AuxLinearOp,
    DeformationSolution,
    HamConfig,
    NonlinearOde,
    ResonantForcing,
    UnboundedMode,
    ham_solve,
    homotopy_residual,
    nu_coefficients,
    rm_term,
    solve_deformation_step,
    solve_problem_a,
)
from .taylor import (
    InsufficientTail,
    RadiusEstimate,
    TaylorExpansion,
    estimate_radius,
    predicted_radius,
    recenter,
    sech_taylor_reference,
    taylor_from_ode,
)
from .problems import (
    PROBLEM_A,
    PROBLEM_B,
    DomainError,
    ProblemDef,
    ResidualReport,
    global_exp_representation,
    optimal_h,
    problem_b_exact,
    residual_a,
    residual_b,
    sech_exact,
    verify_l2_kernel,
)

__version__ = "0.1.0"
