"""Quantum Fisher information of postselected compression channels.

A spin-j system couples to a d-dimensional, n-copy qudit meter; conditioning
on a final magnetic state turns the joint evolution into an effective meter
channel whose sensitivity to the coupling is set by the postselection phase.
This package evaluates the closed-form channel quantities, locates the
characteristic phases that optimize them, and cross-validates everything
against a dense state-vector oracle.
"""

from .channel import (
    ChannelParams,
    EstimationBudget,
    QfiBreakdown,
    VanishingPostselectionError,
    cramer_rao_uncertainty,
    interference_probability_qubit,
    postselection_probability,
    q_parallel,
    q_total,
    qfi_breakdown,
    snr_bound,
)
from .landmarks import (
    CoincidenceReport,
    DegenerateLandscapeError,
    NoSuppressionError,
    ThetaLandmarks,
    coincidence_check,
    compute_landmarks,
    theta_parallel_zero,
    theta_perp_max,
    theta_total_max,
)
from .meter import (
    ComplexExpectation,
    MeterSpec,
    expect_O,
    gauge_shift_equivalence,
    pancharatnam_visibility,
    parallel_transport_term,
)
from .oracle import (
    ConjugatePointError,
    DenseState,
    SpinOps,
    evolve_joint,
    gauge_invariance_check,
    noncyclic_geometric_phase,
    parallel_transport_residual,
    qfi_finite_difference,
)
from .wigner import DomainError, HalfInt, wigner_d, wigner_d_deriv, wigner_d_matrix

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ChannelParams",
    "CoincidenceReport",
    "ComplexExpectation",
    "ConjugatePointError",
    "DegenerateLandscapeError",
    "DenseState",
    "DomainError",
    "EstimationBudget",
    "HalfInt",
    "MeterSpec",
    "NoSuppressionError",
    "QfiBreakdown",
    "SpinOps",
    "ThetaLandmarks",
    "VanishingPostselectionError",
    "coincidence_check",
    "compute_landmarks",
    "cramer_rao_uncertainty",
    "evolve_joint",
    "expect_O",
    "gauge_invariance_check",
    "gauge_shift_equivalence",
    "interference_probability_qubit",
    "noncyclic_geometric_phase",
    "pancharatnam_visibility",
    "parallel_transport_residual",
    "postselection_probability",
    "q_parallel",
    "q_total",
    "qfi_breakdown",
    "qfi_finite_difference",
    "snr_bound",
    "theta_parallel_zero",
    "theta_perp_max",
    "theta_total_max",
    "wigner_d",
    "wigner_d_deriv",
    "wigner_d_matrix",
]
