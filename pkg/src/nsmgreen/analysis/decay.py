"""L2 norms of linear solutions by Plancherel and decay-exponent fitting.

With data U0(k) = f(|k|) * (angular template) the norm of a component at
time t is (2 pi)^(-3/2) (int |component of G(t,k) U0(k)|^2 dk)^(1/2),
evaluated with composite Gauss-Legendre in |k| times a Lebedev rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import DomainError, PhysParams
from ..greenfn import propagate
from .quadrature import composite_gauss_legendre, lebedev

COMPONENTS = ("n", "u", "E", "B", "gradB")
SHAPES = ("gaussian", "bump", "power_cutoff")


class QuadratureError(RuntimeError):
    """Order doubling changed a norm by more than the accepted tolerance."""


@dataclass(frozen=True)
class RadialProfile:
    """Initial data f(|k|) times fixed angular templates.

    n_w: Gauss-law pair with E_par = i n_w f khat and n = (gamma/beta) n_w |k| f
    u_w, E_w, B_w: constant directions; E and B are projected perpendicular to k
    """

    shape: str = "gaussian"
    shape_args: tuple = (1.0,)
    n_w: float = 0.0
    u_w: tuple = (0.0, 0.0, 0.0)
    E_w: tuple = (0.0, 0.0, 0.0)
    B_w: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise DomainError(f"unknown radial shape {self.shape!r}")
        for name in ("u_w", "E_w", "B_w"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))
            if len(getattr(self, name)) != 3:
                raise DomainError(f"{name} must have three components")
        object.__setattr__(self, "shape_args", tuple(float(x) for x in self.shape_args))

    @classmethod
    def source(cls, component: str, shape="gaussian", shape_args=(1.0,)) -> "RadialProfile":
        """Unit data in a single source slot."""
        e = (1.0, 0.0, 0.0)
        slots = {"n": {"n_w": 1.0}, "u": {"u_w": e}, "E": {"E_w": e}, "B": {"B_w": e}}
        if component not in slots:
            raise DomainError(f"unknown source {component!r}")
        return cls(shape, shape_args, **slots[component])

    def radial(self, kmag):
        kmag = np.asarray(kmag, dtype=float)
        if self.shape == "gaussian":
            (width,) = self.shape_args
            return np.exp(-0.5 * (kmag / width) ** 2)
        if self.shape == "bump":
            (support,) = self.shape_args
            x = np.minimum(kmag / support, 1.0)
            with np.errstate(divide="ignore", over="ignore"):
                return np.where(x < 1, np.exp(1.0 - 1.0 / np.maximum(1 - x * x, 1e-300)), 0.0)
        p, kmax = self.shape_args
        return np.where(kmag < kmax, (1 + kmag * kmag) ** (-p / 2), 0.0)

    def support(self) -> float:
        """Radius beyond which the radial factor is below 1e-17 or zero."""
        if self.shape == "gaussian":
            return self.shape_args[0] * math.sqrt(2 * math.log(1e17))
        if self.shape == "bump":
            return self.shape_args[0]
        return self.shape_args[1]

    def fields(self, params: PhysParams, kvecs):
        """Initial (n, u, E, B) at each wavevector row of kvecs."""
        kmag = np.linalg.norm(kvecs, axis=1)
        khat = kvecs / kmag[:, None]
        f = self.radial(kmag)

        def perp(w):
            w = np.asarray(w)
            return f[:, None] * (w[None, :] - khat * (khat @ w)[:, None])

        n = (params.gamma / params.beta) * self.n_w * kmag * f + 0j
        u = f[:, None] * np.asarray(self.u_w)[None, :] + 0j
        E = perp(self.E_w) + 1j * self.n_w * f[:, None] * khat
        B = perp(self.B_w) + 0j
        return n, u, E, B


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    log_prefactor: float
    residual_rms: float
    window: tuple
    n_points: int


def _grid(profile: RadialProfile, radial_order: int, k_max: float | None, kmin: float, panels: int):
    top = profile.support() if k_max is None else k_max
    breaks = np.concatenate([[0.0], np.geomspace(kmin, top, panels)])
    return composite_gauss_legendre(breaks, radial_order)


def _norms_once(params, profile, t_grid, radial_order, k_max, angular_degree, kmin, panels):
    kr, wr = _grid(profile, radial_order, k_max, kmin, panels)
    nodes, wa = lebedev(angular_degree)
    kvecs = (kr[:, None, None] * nodes[None, :, :]).reshape(-1, 3)
    weights = (wr[:, None] * kr[:, None] ** 2 * wa[None, :]).ravel()
    k2 = np.einsum("ij,ij->i", kvecs, kvecs)
    n0, u0, E0, B0 = profile.fields(params, kvecs)
    scale = (2 * math.pi) ** -1.5
    out = np.empty((len(t_grid), len(COMPONENTS)))
    for i, t in enumerate(t_grid):
        n, u, E, B = propagate(params, float(t), kvecs, n0, u0, E0, B0, carry_steady=False)
        dens = (
            np.abs(n) ** 2,
            np.sum(np.abs(u) ** 2, axis=1),
            np.sum(np.abs(E) ** 2, axis=1),
            np.sum(np.abs(B) ** 2, axis=1),
            k2 * np.sum(np.abs(B) ** 2, axis=1),
        )
        out[i] = [scale * math.sqrt(max(float(weights @ d), 0.0)) for d in dens]
    return out


def l2_norm_evolution(
    params: PhysParams,
    profile: RadialProfile,
    t_grid,
    radial_quad=(16, None),
    angular_quad: int = 7,
    kmin: float = 1e-3,
    panels: int = 96,
    rtol: float = 1e-3,
    check: bool = True,
    n_check: int = 5,
):
    """Norms of n, u, E, B and grad B at each t.

    Returns a dict of arrays keyed by COMPONENTS.  With check=True the
    calculation is repeated at n_check evenly spread times with doubled
    radial order, doubled panel count and the next angular rule, and
    QuadratureError is raised if any norm above 1e-300 moves by more than
    rtol.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid < 0):
        raise DomainError("times must be nonnegative")
    order, k_max = radial_quad
    base = _norms_once(params, profile, t_grid, order, k_max, angular_quad, kmin, panels)
    if check:
        idx = np.unique(np.linspace(0, len(t_grid) - 1, n_check).round().astype(int))
        fine = _norms_once(params, profile, t_grid[idx], 2 * order, k_max, 11, kmin / 2, 2 * panels)
        coarse = base[idx]
        mask = fine > 1e-300
        change = np.max(np.abs(fine - coarse)[mask] / fine[mask]) if np.any(mask) else 0.0
        if change > rtol:
            raise QuadratureError(f"order doubling changed a norm by {change:.2e} (> {rtol:.1e})")
    return {c: base[:, j] for j, c in enumerate(COMPONENTS)}


def fit_decay_exponent(series, window=(50.0, 500.0)) -> DecayFit:
    """Least squares of log value against log(1 + t) on the window."""
    data = np.asarray(series, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise DomainError("series must be a list of (t, value) pairs")
    t, v = data[:, 0], data[:, 1]
    lo, hi = window
    sel = (t >= lo) & (t <= hi)
    if np.count_nonzero(sel) < 8:
        raise DomainError("need at least 8 points in the fit window")
    if np.any(v[sel] <= 0):
        raise DomainError("values must be positive")
    x = np.log1p(t[sel])
    y = np.log(v[sel])
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return DecayFit(float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(resid**2))), (lo, hi), int(sel.sum()))
