"""Green's function, decay analysis and nonlinear solver for the linearized
and full Navier-Stokes-Maxwell system in normalized variables."""

from .core import (
    DECAY_WIDTH,
    P_DECAY,
    P_DEGENERATE,
    P_REF,
    DomainError,
    FourierMode,
    PhysParams,
    RegimeLabel,
    check_constraints,
    classify_regime,
    random_constrained_mode,
    rescale_to_normalized,
)
from .greenfn import GreenEM, GreenEval, GreenFluid, apply_green, green_eval, green_matrix, propagate
from .oracle import OdeReport, integrate_mode, verify_green_vs_oracle
from .spectra import CubicRoots, QuadraticRoots, cubic_discriminant, discriminant_zero_set, em_cubic_roots, fluid_roots

__version__ = "0.1.0"

__all__ = [
    "CubicRoots",
    "DECAY_WIDTH",
    "DomainError",
    "FourierMode",
    "GreenEM",
    "GreenEval",
    "GreenFluid",
    "OdeReport",
    "P_DECAY",
    "P_DEGENERATE",
    "P_REF",
    "PhysParams",
    "QuadraticRoots",
    "RegimeLabel",
    "apply_green",
    "check_constraints",
    "classify_regime",
    "cubic_discriminant",
    "discriminant_zero_set",
    "em_cubic_roots",
    "fluid_roots",
    "green_eval",
    "green_matrix",
    "integrate_mode",
    "propagate",
    "random_constrained_mode",
    "rescale_to_normalized",
    "verify_green_vs_oracle",
]
