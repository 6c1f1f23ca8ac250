"""Sobolev energy functionals E_N, D_N and their high-order variants.

Derivative sums use the gradient-norm convention
sum_{|alpha| = j} ||d^alpha f||^2 -> ||grad^j f||^2, which is |k|^(2j) per
Fourier mode, so a single mode at k reduces every functional to a
Hermitian form in (n, u, E, B) with scalar weights in |k|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from ..analysis.lyapunov import (
    B_IDX,
    E_IDX,
    N_IDX,
    U_IDX,
    LyapunovWeights,
    SearchFailure,
    _add_re_inner,
)
from ..core import DomainError, PhysParams
from ..greenfn import constrained_basis, cross_matrix
from ..oracle import generator
from .grid import GridConfig, GridState, Spectral, to_spectral


@dataclass(frozen=True)
class EnergyReport:
    E_N: float
    D_N: float
    E_N_h: float
    D_N_h: float
    N_order: int


def _powsum(k2, lo, hi):
    """sum_{j=lo}^{hi} k2^j, zero when hi < lo."""
    out = np.zeros_like(k2, dtype=float)
    for j in range(lo, hi + 1):
        out = out + k2**j
    return out


def energy_weights(N: int, k2, high: bool = False):
    """Scalar weights (diag, n-u, E-u, B-E) of E_N (or E_N^h) at |k|^2 = k2."""
    lo = 1 if high else 0
    return (
        _powsum(k2, lo, N),
        _powsum(k2, lo, N - 1),
        _powsum(k2, lo, N - 2),
        _powsum(k2, max(1, lo + 1), N - 2),
    )


def dissipation_weights(N: int, k2, high: bool = False):
    """Weights of (|n|^2, |u|^2, |E|^2, |B|^2) in D_N (or D_N^h)."""
    if high:
        return (_powsum(k2, 1, N), k2 * k2 * _powsum(k2, 0, N - 1), k2 * k2 * _powsum(k2, 0, N - 3), k2**3 * _powsum(k2, 0, N - 4))
    return (_powsum(k2, 0, N), k2 * _powsum(k2, 0, N), k2 * _powsum(k2, 0, N - 2), k2 * k2 * _powsum(k2, 0, N - 3))


def mode_energy_matrix(params: PhysParams, weights: LyapunovWeights, k, N: int, high: bool = False):
    """Hermitian Q with E_N restricted to one Fourier mode equal to U^H Q U."""
    k = np.asarray(k, dtype=float)
    k2 = float(k @ k)
    w0, w1, w2, w3 = (float(x) for x in energy_weights(N, np.array(k2), high))
    k1, k2w = weights.kappa1, weights.kappa2
    Q = w0 * np.eye(10, dtype=complex)
    _add_re_inner(Q, U_IDX, N_IDX, k1 * w1 * (1j * params.gamma * k)[:, None])
    _add_re_inner(Q, U_IDX, E_IDX, k1 * w2 * (k2 * np.eye(3) - np.outer(k, k)))
    _add_re_inner(Q, E_IDX, B_IDX, k1 * k2w * w3 * (-1j * cross_matrix(k)))
    return Q


def energy_margin(params: PhysParams, weights: LyapunovWeights, k, N: int) -> float:
    """Smallest generalized eigenvalue of (-dE_N/dt, E_N) on the constraint subspace."""
    k = np.asarray(k, dtype=float)
    V = constrained_basis(params, k)
    Q = mode_energy_matrix(params, weights, k, N)
    L = generator(params, k)
    P = -(L.conj().T @ Q + Q @ L)
    P = V.conj().T @ P @ V
    Qr = V.conj().T @ Q @ V
    return float(eigh(0.5 * (P + P.conj().T), 0.5 * (Qr + Qr.conj().T), eigvals_only=True)[0])


def choose_energy_weights(params: PhysParams, config: GridConfig, N: int, exponents=range(2, 11)):
    """Weights for which E_N decreases under the linear flow on every grid shell.

    Returns (weights, margin) maximizing the worst relative decay rate
    over the distinct nonzero |k| of the dealiased grid.
    """
    sp = Spectral.build(config)
    k2s = np.unique(np.round(sp.k2[sp.mask & (sp.k2 > 0)], 12))
    base = 2 * np.pi / config.box_length
    # one representative direction per shell; the margin depends on |k| only
    ks = [np.array([0.0, 0.0, np.sqrt(k2)]) for k2 in k2s]
    best = (-np.inf, None)
    for e1 in exponents:
        for e2 in exponents:
            w = LyapunovWeights(2.0**-e1, 2.0**-e2)
            m = min(energy_margin(params, w, k, N) for k in ks)
            if m > best[0]:
                best = (m, w)
    if best[0] <= 0:
        raise SearchFailure(f"no weights make E_{N} decrease on every shell (best {best[0]:.3e}, base {base})")
    return best[1], best[0]


def _cross_terms(params, sp, fields, N, high, kappa1, kappa2):
    nh, vh, Eh, Bh = fields
    k2 = sp.k2
    w0, w1, w2, w3 = energy_weights(N, k2, high)
    grad_n = 1j * params.gamma * sp.k * nh[None]
    nu = np.sum(np.real(grad_n * np.conj(vh)), axis=0)
    eu = np.sum(np.real(sp.curl(Eh) * np.conj(sp.curl(vh))), axis=0)
    be = np.sum(np.real(-sp.curl(Bh) * np.conj(Eh)), axis=0)
    sq = np.abs(nh) ** 2 + np.sum(np.abs(vh) ** 2 + np.abs(Eh) ** 2 + np.abs(Bh) ** 2, axis=0)
    return np.sum(w0 * sq + kappa1 * (w1 * nu + w2 * eu) + kappa1 * kappa2 * w3 * be)


def energy_functionals(
    params: PhysParams, state: GridState, N_order: int, weights: LyapunovWeights, config: GridConfig | None = None
) -> EnergyReport:
    n = state.rho.shape[-1]
    config = config or GridConfig(n_per_axis=n)
    if N_order < 1 or N_order > n // 4:
        raise DomainError(f"N_order must lie in [1, {n // 4}] on a {n}^3 grid")
    sp = Spectral.build(config)
    fields = to_spectral(state, sp)
    # Parseval: int |f|^2 dx = L^3 sum |f_hat / n^3|^2
    norm = config.box_length**3 / float(n) ** 6
    nh, vh, Eh, Bh = fields
    out = []
    for high in (False, True):
        e = norm * _cross_terms(params, sp, fields, N_order, high, weights.kappa1, weights.kappa2)
        dn, du, de, db = dissipation_weights(N_order, sp.k2, high)
        d = norm * np.sum(
            dn * np.abs(nh) ** 2
            + du * np.sum(np.abs(vh) ** 2, axis=0)
            + de * np.sum(np.abs(Eh) ** 2, axis=0)
            + db * np.sum(np.abs(Bh) ** 2, axis=0)
        )
        out += [float(e), float(d)]
    return EnergyReport(out[0], out[1], out[2], out[3], N_order)
