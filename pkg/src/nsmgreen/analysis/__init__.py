"""Lyapunov certificates, pointwise bounds, L2 decay rates and index helpers."""

from .bounds import (
    BoundConstants,
    BoundTable,
    RatioScanReport,
    bound_ratio_scan,
    c_fit_drift,
    pointwise_bound,
    slow_branch_rate,
    slow_branch_scaling,
)
from .decay import (
    COMPONENTS,
    DecayFit,
    QuadratureError,
    RadialProfile,
    fit_decay_exponent,
    l2_norm_evolution,
)
from .indices import delta_index, m_index, rate_indices
from .lyapunov import (
    LyapunovWeights,
    SearchFailure,
    choose_weights,
    default_k_grid,
    dissipation_check,
    dissipation_matrix,
    energy_rate,
    exact_margin,
    lyapunov_matrix,
    lyapunov_value,
    trajectory_bound_violation,
)
from .quadrature import composite_gauss_legendre, lebedev

__all__ = [
    "BoundConstants",
    "BoundTable",
    "COMPONENTS",
    "DecayFit",
    "LyapunovWeights",
    "QuadratureError",
    "RadialProfile",
    "RatioScanReport",
    "SearchFailure",
    "bound_ratio_scan",
    "c_fit_drift",
    "choose_weights",
    "composite_gauss_legendre",
    "default_k_grid",
    "delta_index",
    "dissipation_check",
    "dissipation_matrix",
    "energy_rate",
    "exact_margin",
    "fit_decay_exponent",
    "l2_norm_evolution",
    "lebedev",
    "lyapunov_matrix",
    "lyapunov_value",
    "m_index",
    "pointwise_bound",
    "rate_indices",
    "slow_branch_rate",
    "slow_branch_scaling",
    "trajectory_bound_violation",
]
