"""Pseudospectral solver for the nonlinear system on a periodic box."""

from .energy import EnergyReport, choose_energy_weights, energy_functionals, energy_margin, mode_energy_matrix
from .grid import GridConfig, GridState, Spectral, StateError
from .simulate import SimulationAborted, SimulationResult, linear_solution, profile_state, random_state, simulate
from .solver import (
    compatibility_residual,
    constraint_project,
    constraint_residuals,
    nonlinear_rhs,
    step_etd,
)

__all__ = [
    "EnergyReport",
    "GridConfig",
    "GridState",
    "SimulationAborted",
    "SimulationResult",
    "Spectral",
    "StateError",
    "choose_energy_weights",
    "compatibility_residual",
    "constraint_project",
    "constraint_residuals",
    "energy_functionals",
    "energy_margin",
    "linear_solution",
    "mode_energy_matrix",
    "nonlinear_rhs",
    "profile_state",
    "random_state",
    "simulate",
    "step_etd",
]
