"""Time-frequency Lyapunov functional and its dissipation certificate.

For a mode U = (n, u, E, B) at wavevector k the functional is

    E(U) = |U|^2 + k1 Re(i gamma k n | u)/(1+|k|^2)
                 + k1 |k|^2 Re(E | u)/(1+|k|^2)^2
                 + k1 k2 |k|^2 Re(-i k x B | E)/(1+|k|^2)^3

with (x | y) = sum x_j conj(y_j).  It is a Hermitian form U^H Q U, so its
time derivative along the linear flow is -U^H P U with P = -(L^H Q + Q L).
The certificate compares P with the dissipation form

    W = diag(1, |k|^2, |k|^2/(1+|k|^2)^2, |k|^4/(1+|k|^2)^3)

on the constraint subspace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from ..core import DomainError, FourierMode, PhysParams, random_constrained_mode
from ..greenfn import constrained_basis, cross_matrix, propagate
from ..oracle import generator

KAPPA_CAP = 0.5
SEARCH_EXPONENTS = tuple(range(2, 11))


class SearchFailure(RuntimeError):
    """No weight pair with a positive dissipation margin was found."""


@dataclass(frozen=True)
class LyapunovWeights:
    kappa1: float
    kappa2: float

    def __post_init__(self):
        for name in ("kappa1", "kappa2"):
            v = getattr(self, name)
            if not 0 <= v <= KAPPA_CAP:
                raise DomainError(f"{name} must lie in [0, {KAPPA_CAP}], got {v!r}")

    def theta(self, params: PhysParams) -> float:
        """Cauchy-Schwarz bound on the cross terms relative to |U|^2."""
        return self.kappa1 * (1 + self.kappa2) * max(1.0, params.gamma / 2)

    def c_eq(self, params: PhysParams) -> float:
        return 1.0 - self.theta(params)

    def C_eq(self, params: PhysParams) -> float:
        return 1.0 + self.theta(params)


def _add_re_inner(Q, rows, cols, M):
    """Add the Hermitian form of Re(y^H M x) with y on rows, x on cols."""
    Q[np.ix_(rows, cols)] += 0.5 * M
    Q[np.ix_(cols, rows)] += 0.5 * M.conj().T


N_IDX = [0]
U_IDX = [1, 2, 3]
E_IDX = [4, 5, 6]
B_IDX = [7, 8, 9]


def lyapunov_matrix(params: PhysParams, weights: LyapunovWeights, k, w1=None, w2=None, w3=None, w0=1.0):
    """Hermitian Q with E(U) = U^H Q U.

    The optional w0..w3 override the frequency weights of the four terms,
    which lets the same builder produce the higher-order functionals.
    """
    k = np.asarray(k, dtype=float)
    k2 = float(k @ k)
    if w1 is None:
        w1 = 1.0 / (1 + k2)
    if w2 is None:
        w2 = k2 / (1 + k2) ** 2
    if w3 is None:
        w3 = k2 / (1 + k2) ** 3
    k1, k2w = weights.kappa1, weights.kappa2
    Q = w0 * np.eye(10, dtype=complex)
    _add_re_inner(Q, U_IDX, N_IDX, k1 * w1 * (1j * params.gamma * k)[:, None])
    _add_re_inner(Q, U_IDX, E_IDX, k1 * w2 * np.eye(3))
    _add_re_inner(Q, E_IDX, B_IDX, k1 * k2w * w3 * (-1j * cross_matrix(k)))
    return Q


def dissipation_matrix(k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    k2 = float(k @ k)
    d = np.empty(10)
    d[0] = 1.0
    d[1:4] = k2
    d[4:7] = k2 / (1 + k2) ** 2
    d[7:10] = k2 * k2 / (1 + k2) ** 3
    return np.diag(d).astype(complex)


def decay_matrix(params: PhysParams, Q, k) -> np.ndarray:
    """P = -(L^H Q + Q L), so that dE/dt = -U^H P U."""
    L = generator(params, k)
    return -(L.conj().T @ Q + Q @ L)


def _quad(M, U):
    return float(np.real(np.vdot(U, M @ U)))


def lyapunov_value(params: PhysParams, weights: LyapunovWeights, mode: FourierMode) -> float:
    Q = lyapunov_matrix(params, weights, mode.k)
    return _quad(Q, mode.as_vector())


def energy_rate(params: PhysParams, weights: LyapunovWeights, mode: FourierMode) -> float:
    """dE/dt along the linear flow, evaluated exactly through the generator."""
    Q = lyapunov_matrix(params, weights, mode.k)
    return -_quad(decay_matrix(params, Q, mode.k), mode.as_vector())


def exact_margin(params: PhysParams, weights: LyapunovWeights, k) -> float:
    """Smallest c with -dE/dt >= c W over all constrained modes at k."""
    k = np.asarray(k, dtype=float)
    if float(k @ k) == 0:
        raise DomainError("margin undefined at k = 0")
    V = constrained_basis(params, k)
    Q = lyapunov_matrix(params, weights, k)
    P = V.conj().T @ decay_matrix(params, Q, k) @ V
    W = V.conj().T @ dissipation_matrix(k) @ V
    P = 0.5 * (P + P.conj().T)
    W = 0.5 * (W + W.conj().T)
    return float(eigh(P, W, eigvals_only=True)[0])


def dissipation_check(
    params: PhysParams,
    weights: LyapunovWeights,
    k,
    mode0: FourierMode,
    t_grid,
    derivative: str = "exact",
    refine: int = 4,
) -> float:
    """Minimum over the trajectory of -dE/dt divided by the dissipation form.

    derivative="exact" uses the generator; "centered" uses centered
    differences of E on a grid refined by the given factor around each point.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if len(t_grid) < 3 or np.any(np.diff(t_grid) <= 0):
        raise DomainError("t_grid must be sorted with at least three points")
    k = np.asarray(k, dtype=float)
    Q = lyapunov_matrix(params, weights, k)
    P = decay_matrix(params, Q, k)
    W = dissipation_matrix(k)
    y0 = mode0.as_vector()
    h_base = np.min(np.diff(t_grid)) / (2 * refine)

    def state(t):
        n, u, E, B = propagate(params, t, k[None], [y0[0]], y0[None, 1:4], y0[None, 4:7], y0[None, 7:10])
        return np.concatenate([n, u[0], E[0], B[0]])

    margins = []
    for t in t_grid:
        U = state(float(t))
        dis = _quad(W, U)
        if derivative == "exact":
            rate = _quad(P, U)
        elif derivative == "centered":
            h = min(h_base, max(t, 1e-300)) if t > 0 else h_base
            lo = max(t - h, 0.0)
            rate = -(_quad(Q, state(t + h)) - _quad(Q, state(lo))) / (t + h - lo)
        else:
            raise DomainError(f"unknown derivative mode {derivative!r}")
        margins.append(rate / dis if dis > 0 else np.inf)
    return float(np.min(margins))


def default_k_grid(n=60, kmin=1e-2, kmax=1e2, seed=0):
    rng = np.random.default_rng(seed)
    d = rng.standard_normal((n, 3))
    d /= np.linalg.norm(d, axis=1)[:, None]
    return np.geomspace(kmin, kmax, n)[:, None] * d


def choose_weights(params: PhysParams, k_grid, exponents=SEARCH_EXPONENTS):
    """Grid search over kappa = 2^-e maximizing the worst-case margin on k_grid.

    Returns (weights, margin).  The margin at each k is the exact minimum
    over the constraint subspace, so it bounds every trajectory.
    """
    k_grid = np.atleast_2d(np.asarray(k_grid, dtype=float))
    if len(k_grid) == 0:
        raise DomainError("empty k grid")
    best = (-np.inf, None)
    for e1 in exponents:
        for e2 in exponents:
            w = LyapunovWeights(2.0**-e1, 2.0**-e2)
            if w.c_eq(params) <= 0:
                continue
            margin = min(exact_margin(params, w, k) for k in k_grid)
            if margin > best[0]:
                best = (margin, w)
    if best[1] is None or best[0] <= 0:
        raise SearchFailure(f"no weights with positive margin (best {best[0]:.3e})")
    return best[1], best[0]


def trajectory_bound_violation(params, weights, margin, k, t_grid, n_modes=3, seed=0):
    """Largest E(t) / (E(0) exp(-margin rho(k) t)) over random constrained modes,
    with rho(k) = |k|^4/(1+|k|^2)^3.  Values <= 1 confirm the decay bound."""
    k = np.asarray(k, dtype=float)
    k2 = float(k @ k)
    rho = k2 * k2 / (1 + k2) ** 3
    rng = np.random.default_rng(seed)
    Q = lyapunov_matrix(params, weights, k)
    worst = 0.0
    for _ in range(n_modes):
        y0 = random_constrained_mode(params, k, rng).as_vector()
        e0 = _quad(Q, y0)
        for t in t_grid:
            n, u, E, B = propagate(params, float(t), k[None], [y0[0]], y0[None, 1:4], y0[None, 4:7], y0[None, 7:10])
            U = np.concatenate([n, u[0], E[0], B[0]])
            worst = max(worst, _quad(Q, U) / (e0 * np.exp(-margin * rho * t)))
    return worst
