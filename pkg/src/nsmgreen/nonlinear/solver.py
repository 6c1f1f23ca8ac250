"""Pseudospectral nonlinear solver with an integrating-factor Heun scheme.

The linear part is advanced with the exact propagator; the nonlinear
tendencies (h1, h2, h3) are treated explicitly:

    U1 = G(dt) (U + dt N(U))
    U+ = G(dt) U + dt/2 (G(dt) N(U) + N(U1))

followed by projection onto the constraints.  The pressure law is
P(n) = K n^index with K chosen so that P'(n_b) = gamma^2.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..core import PhysParams
from ..greenfn import propagate
from .grid import GridConfig, GridState, Spectral, StateError, from_spectral, to_spectral

VACUUM_FRACTION = 0.1


def _check_vacuum(rho, params: PhysParams):
    n_b = params.beta**2
    if np.min(rho) + n_b < VACUUM_FRACTION * n_b:
        raise StateError(f"vacuum guard violated: min(rho + n_b) = {np.min(rho) + n_b:.3e}")


def _nonlinear_spectral(params: PhysParams, fields, sp: Spectral, config: GridConfig):
    g, b, mu = params.gamma, params.beta, params.mu
    n_b = b * b
    nu = mu * n_b
    nh, vh, Eh, Bh = fields
    rho = sp.ifft(nh)
    _check_vacuum(rho, params)
    v = sp.ifft(vh)
    B = sp.ifft(Bh)
    grad_v = np.array([sp.ifft(sp.grad(vh[i])) for i in range(3)])  # grad_v[i, j] = d_j v_i
    lap_v = sp.ifft(-sp.k2[None] * vh)
    grad_rho = sp.ifft(sp.grad(nh))

    flux_h = sp.fft(rho[None] * v)
    h3 = flux_h / b
    h1 = -(g / b**2) * sp.div(flux_h)

    adv = np.einsum("jxyz,ijxyz->ixyz", v, grad_v)
    ratio = 1.0 + rho / n_b
    press = (g * g / n_b) * (ratio ** (config.pressure_index - 2.0) - 1.0)
    vxB = np.cross(v, B, axis=0)
    visc = nu * (1.0 / (rho + n_b) - 1.0 / n_b)
    h2 = -(g / b**2) * adv - (b * b / g) * press[None] * grad_rho - (g / b) * vxB + visc[None] * lap_v
    h2 = sp.fft(h2)
    return h1, h2, h3, np.zeros_like(Bh)


def nonlinear_rhs(params: PhysParams, state: GridState, config: GridConfig):
    """Tendencies (h1, h2, h3) as real fields."""
    sp = Spectral.build(config)
    h1, h2, h3, _ = _nonlinear_spectral(params, to_spectral(state, sp), sp, config)
    return sp.ifft(h1), sp.ifft(h2), sp.ifft(h3)


def compatibility_residual(params: PhysParams, state: GridState, config: GridConfig) -> float:
    """||div h3 + (beta/gamma) h1|| relative to ||h3||."""
    sp = Spectral.build(config)
    h1, _, h3, _ = _nonlinear_spectral(params, to_spectral(state, sp), sp, config)
    res = np.linalg.norm(sp.div(h3) + params.beta / params.gamma * h1)
    scale = np.linalg.norm(h3)
    return float(res / scale) if scale > 0 else float(res)


def linear_flow(params: PhysParams, fields, sp: Spectral, t: float):
    """Exact linear propagation of every retained mode."""
    nh, vh, Eh, Bh = fields
    shape = nh.shape
    k = sp.k.reshape(3, -1).T
    n, u, E, B = propagate(
        params, t, k, nh.reshape(-1), vh.reshape(3, -1).T, Eh.reshape(3, -1).T, Bh.reshape(3, -1).T
    )
    return (
        n.reshape(shape) * sp.mask,
        u.T.reshape((3,) + shape) * sp.mask,
        E.T.reshape((3,) + shape) * sp.mask,
        B.T.reshape((3,) + shape) * sp.mask,
    )


def project_spectral(params: PhysParams, fields, sp: Spectral):
    nh, vh, Eh, Bh = fields
    k, k2 = sp.k, sp.k2
    nz = k2 > 0
    inv = np.where(nz, 1.0 / np.where(nz, k2, 1.0), 0.0)
    e_par = np.sum(k * Eh, axis=0) * inv
    b_par = np.sum(k * Bh, axis=0) * inv
    gauss = 1j * (params.beta / params.gamma) * nh * inv
    Eh = Eh - k * e_par[None] + k * gauss[None]
    Bh = Bh - k * b_par[None]
    return nh, vh, Eh, Bh


def constraint_project(state: GridState, params: PhysParams, config: GridConfig | None = None) -> GridState:
    """Set E_par from Gauss's law and remove B_par, mode by mode."""
    config = config or GridConfig(n_per_axis=state.rho.shape[-1])
    sp = Spectral.build(replace_fraction(config))
    return from_spectral(project_spectral(params, to_spectral(state, sp), sp), sp, state.time)


def replace_fraction(config: GridConfig) -> GridConfig:
    """Same grid without dealiasing, so projection never drops modes."""
    return replace(config, dealias_fraction=1.0)


def _combine(a, b, sa=1.0, sb=1.0):
    return tuple(sa * x + sb * y for x, y in zip(a, b))


def step_fields(params: PhysParams, fields, sp: Spectral, config: GridConfig, dt: float):
    N0 = _nonlinear_spectral(params, fields, sp, config)
    GU = linear_flow(params, fields, sp, dt)
    GN = linear_flow(params, N0, sp, dt)
    U1 = _combine(GU, GN, 1.0, dt)
    N1 = _nonlinear_spectral(params, U1, sp, config)
    out = tuple(gu + 0.5 * dt * (gn + n1) for gu, gn, n1 in zip(GU, GN, N1))
    return project_spectral(params, out, sp)


def step_etd(params: PhysParams, state: GridState, config: GridConfig, dt: float | None = None) -> GridState:
    """Advance one step of size dt (default config.dt)."""
    dt = config.dt if dt is None else dt
    sp = Spectral.build(config)
    fields = step_fields(params, to_spectral(state, sp), sp, config, dt)
    return from_spectral(fields, sp, state.time + dt)


def dt_cap(state: GridState, config: GridConfig) -> float:
    vmax = float(np.max(np.sqrt(np.sum(state.v**2, axis=0))))
    if vmax == 0:
        return 0.5
    return min(0.5, 0.25 * config.box_length / (config.n_per_axis * vmax))


def constraint_residuals(params: PhysParams, state: GridState, config: GridConfig):
    """Relative spectral residuals of Gauss's law and of div B."""
    sp = Spectral.build(replace_fraction(config))
    nh, _, Eh, Bh = to_spectral(state, sp)
    gauss = np.linalg.norm(sp.div(Eh) + params.beta / params.gamma * nh)
    div_b = np.linalg.norm(sp.div(Bh))
    e_norm = np.linalg.norm(Eh)
    b_norm = np.linalg.norm(Bh)
    return (
        float(gauss / e_norm) if e_norm > 0 else float(gauss),
        float(div_b / b_norm) if b_norm > 0 else float(div_b),
    )
