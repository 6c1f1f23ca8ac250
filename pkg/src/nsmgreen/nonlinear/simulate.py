"""Time loop, initial data and diagnostics for the nonlinear solver."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..analysis.decay import RadialProfile
from ..analysis.lyapunov import LyapunovWeights
from ..core import DomainError, PhysParams
from .energy import EnergyReport, choose_energy_weights, energy_functionals
from .grid import GridConfig, GridState, Spectral, StateError, from_spectral, l2, to_spectral
from .solver import constraint_residuals, dt_cap, linear_flow, project_spectral, step_fields

GROWTH_LIMIT = 10.0
N_ORDER = 4


class SimulationAborted(RuntimeError):
    def __init__(self, message, series=None):
        super().__init__(message)
        self.series = series


def _normalize(fields, sp, amplitude):
    state = from_spectral(fields, sp, 0.0)
    peak = state.max_abs()
    if peak == 0:
        return fields
    return tuple(f * (amplitude / peak) for f in fields)


def profile_state(params: PhysParams, config: GridConfig, profile: RadialProfile) -> GridState:
    """Sample a radial profile on the grid, band-limit it and scale to the amplitude."""
    sp = Spectral.build(config)
    kv = sp.k.reshape(3, -1).T
    nz = sp.k2.reshape(-1) > 0
    n = np.zeros(len(kv), complex)
    u = np.zeros((len(kv), 3), complex)
    E = np.zeros((len(kv), 3), complex)
    B = np.zeros((len(kv), 3), complex)
    n[nz], u[nz], E[nz], B[nz] = profile.fields(params, kv[nz])
    shape = sp.k2.shape
    fields = (
        n.reshape(shape) * sp.mask,
        u.T.reshape((3,) + shape) * sp.mask,
        E.T.reshape((3,) + shape) * sp.mask,
        B.T.reshape((3,) + shape) * sp.mask,
    )
    fields = project_spectral(params, fields, sp)
    return from_spectral(_normalize(fields, sp, config.amplitude), sp, 0.0)


def random_state(params: PhysParams, config: GridConfig, seed: int = 0, width: float = 2.0) -> GridState:
    """Smooth random constrained data: Gaussian envelope of the given width in |k|.

    The mean of every field is zero, and the peak value equals the amplitude.
    """
    sp = Spectral.build(config)
    rng = np.random.default_rng(seed)
    shape = sp.k2.shape
    env = np.exp(-0.5 * sp.k2 / width**2) * sp.mask
    env[0, 0, 0] = 0.0

    def cfield(ncomp):
        return rng.standard_normal((ncomp,) + shape) + 1j * rng.standard_normal((ncomp,) + shape)

    n = cfield(1)[0] * env
    u = cfield(3) * env
    E = cfield(3) * env
    B = cfield(3) * env
    # keep only the Hermitian part so that the fields are real
    fields = tuple(sp.fft(sp.ifft(f)) for f in (n, u, E, B))
    fields = project_spectral(params, fields, sp)
    return from_spectral(_normalize(fields, sp, config.amplitude), sp, 0.0)


def linear_solution(params: PhysParams, state: GridState, config: GridConfig, t: float) -> GridState:
    sp = Spectral.build(config)
    return from_spectral(linear_flow(params, to_spectral(state, sp), sp, t), sp, state.time + t)


@dataclass
class SimulationResult:
    series: dict
    energy_steps: np.ndarray
    final: GridState
    weights: LyapunovWeights
    dt: float
    n_steps: int

    def max_energy_increase(self) -> float:
        """Largest step-to-step increase of E_N relative to E_N(0)."""
        e = self.energy_steps
        if len(e) < 2 or e[0] == 0:
            return 0.0
        return float(np.max(np.diff(e)) / e[0])


def _norms(state: GridState, L: float):
    return l2(state.rho, L), l2(state.v, L), l2(state.Et, L), l2(state.Bt, L)


def simulate(
    params: PhysParams,
    config: GridConfig,
    initial=None,
    diagnostics_stride: int = 10,
    weights: LyapunovWeights | None = None,
    n_order: int = N_ORDER,
    seed: int = 0,
    track_energy: bool = True,
) -> SimulationResult:
    """Run to config.t_end and collect diagnostics every diagnostics_stride steps.

    initial: a GridState, a RadialProfile, or None for random smooth data.
    The step is config.dt capped by the advective limit and shortened so
    that an integer number of steps reaches t_end.
    """
    if diagnostics_stride < 1:
        raise DomainError("diagnostics_stride must be >= 1")
    if initial is None:
        state = random_state(params, config, seed)
    elif isinstance(initial, RadialProfile):
        state = profile_state(params, config, initial)
    elif isinstance(initial, GridState):
        state = initial
    else:
        raise DomainError("initial must be a GridState, a RadialProfile or None")
    if weights is None:
        weights, _ = choose_energy_weights(params, config, n_order)

    sp = Spectral.build(config)
    dt = min(config.dt, dt_cap(state, config))
    n_steps = max(1, math.ceil(config.t_end / dt - 1e-12))
    dt = config.t_end / n_steps
    L = config.box_length

    fields = project_spectral(params, to_spectral(state, sp), sp)
    state = from_spectral(fields, sp, 0.0)
    mass0 = float(np.mean(state.rho))
    rho_scale = float(np.sqrt(np.mean(state.rho**2))) or 1.0
    norm0 = math.sqrt(sum(x * x for x in _norms(state, L)))

    keys = (
        "t", "norm_n", "norm_u", "norm_E", "norm_B", "E_N", "D_N", "E_N_h", "D_N_h",
        "gauss_residual", "divB_residual", "mass_drift", "X", "Y", "n_weighted", "E_weighted",
    )
    series = {k: [] for k in keys}
    energy_steps = []

    def record(st: GridState, rep: EnergyReport):
        t = st.time
        nn, nu, ne, nb = _norms(st, L)
        g_res, b_res = constraint_residuals(params, st, config)
        series["t"].append(t)
        series["norm_n"].append(nn)
        series["norm_u"].append(nu)
        series["norm_E"].append(ne)
        series["norm_B"].append(nb)
        series["E_N"].append(rep.E_N)
        series["D_N"].append(rep.D_N)
        series["E_N_h"].append(rep.E_N_h)
        series["D_N_h"].append(rep.D_N_h)
        series["gauss_residual"].append(g_res)
        series["divB_residual"].append(b_res)
        series["mass_drift"].append(abs(float(np.mean(st.rho)) - mass0) / rho_scale)
        series["X"].append((1 + t) ** 0.75 * rep.E_N)
        series["Y"].append((1 + t) ** 1.25 * (nu * nu + rep.E_N_h))
        series["n_weighted"].append(nn * (1 + t))
        series["E_weighted"].append(ne * (1 + t) ** 0.75 / math.log(3 + t))

    def snapshot():
        return {k: np.array(v) for k, v in series.items()}

    rep = energy_functionals(params, state, n_order, weights, config)
    record(state, rep)
    energy_steps.append(rep.E_N)
    for step in range(1, n_steps + 1):
        try:
            fields = step_fields(params, fields, sp, config, dt)
        except StateError as exc:
            raise SimulationAborted(f"step {step}: {exc}", snapshot()) from exc
        state = from_spectral(fields, sp, step * dt)
        norm = math.sqrt(sum(x * x for x in _norms(state, L)))
        if not np.isfinite(norm) or (norm0 > 0 and norm > GROWTH_LIMIT * norm0):
            raise SimulationAborted(f"step {step}: norm grew from {norm0:.3e} to {norm:.3e}", snapshot())
        if track_energy or step % diagnostics_stride == 0 or step == n_steps:
            rep = energy_functionals(params, state, n_order, weights, config)
            energy_steps.append(rep.E_N)
        if step % diagnostics_stride == 0 or step == n_steps:
            record(state, rep)
    return SimulationResult(snapshot(), np.array(energy_steps), state, weights, dt, n_steps)
