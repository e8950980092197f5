"""Exact finite-level harmonic analysis of special balls on gl_n over Q_p.

The package computes, in exact arithmetic (truncated p-adic scalars and
cyclotomic-rational measure values), the special-ball decomposition of
the dual of gl_n(Q_p) at a finite quotient level, the attached Hecke
idempotents, Fourier and exponential compatibilities, and ships a
deterministic verification CLI for the underlying identities.
"""

from .balls import (
    Ball,
    BallCharacter,
    ball_of,
    classify_nilpotent,
    enumerate_balls,
    hecke_idempotent,
    is_admissible,
)
from .cyclo import CycloRational, cyclo_add, cyclo_eq, cyclo_mul, cyclo_neg, psi_of
from .errors import (
    DenominatorTooDeep,
    HypothesisViolated,
    LevelMismatch,
    NotInvertibleAtPrecision,
    PadicBallError,
    PrecisionExhausted,
    QuotientMismatch,
    SessionError,
)
from .expmap import GroupElement, bch_defect, exp_coset, exp_trunc, log_trunc
from .harmonic import (
    big_ball_vanishing_check,
    check_adjoint_constraint,
    check_cor_exp_products,
    check_fouexp,
    check_fouexp_base,
    projector_family_check,
    spectrum,
)
from .lie import DualElement, LieElement, coadjoint, coset_intersects, norm_star, trace_pairing
from .nilpotent import nilpotent_brute_force, nilpotent_in_coset
from .quotient import (
    Measure,
    QuotientDescriptor,
    convolve,
    exp_pullback,
    fourier,
    pointwise_product,
)
from .scalar import TruncatedScalar
from .session import SessionParams

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "BallCharacter",
    "CycloRational",
    "DenominatorTooDeep",
    "DualElement",
    "GroupElement",
    "HypothesisViolated",
    "LevelMismatch",
    "LieElement",
    "Measure",
    "NotInvertibleAtPrecision",
    "PadicBallError",
    "PrecisionExhausted",
    "QuotientDescriptor",
    "QuotientMismatch",
    "SessionError",
    "SessionParams",
    "TruncatedScalar",
    "ball_of",
    "bch_defect",
    "big_ball_vanishing_check",
    "check_adjoint_constraint",
    "check_cor_exp_products",
    "check_fouexp",
    "check_fouexp_base",
    "classify_nilpotent",
    "coadjoint",
    "convolve",
    "coset_intersects",
    "cyclo_add",
    "cyclo_eq",
    "cyclo_mul",
    "cyclo_neg",
    "enumerate_balls",
    "exp_coset",
    "exp_pullback",
    "exp_trunc",
    "fourier",
    "hecke_idempotent",
    "is_admissible",
    "log_trunc",
    "nilpotent_brute_force",
    "nilpotent_in_coset",
    "norm_star",
    "pointwise_product",
    "projector_family_check",
    "psi_of",
    "spectrum",
    "trace_pairing",
]
