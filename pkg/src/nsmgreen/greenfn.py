"""Exact Fourier-space propagator of the linearized system.

The state splits into a fluid block (n, u_par, E_par) and an electromagnetic
block (u_perp, E_perp, B).  Both propagators are written through divided
differences of x -> exp(x t) over the characteristic roots:

    fluid:  roots lambda_+- of z^2 + mu k2 z + gamma^2 k2 + beta^2
    EM:     roots sigma, chi_+- of g(z), in tau = beta t and r = k2/beta^2

For a root pair with centre m and squared half-spread d2 we use

    E = (e^{l+ t} + e^{l- t})/2,   D = (e^{l+ t} - e^{l- t})/(l+ - l-)

which are even in sqrt(d2) and therefore smooth when the pair coalesces.
The EM generator A on the perpendicular block satisfies
exp(tau A) = alpha0 I + alpha1 A + alpha2 A^2, where the alphas combine E,
D and the second divided difference F over {sigma, chi_+, chi_-}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError, FourierMode, PhysParams, check_constraints
from .spectra import em_pair, fluid_pair, fluid_roots

SERIES_SPREAD = 0.1
_N_SERIES = 30


# ---------------------------------------------------------------------------
# scalar divided differences (general complex nodes)


@dataclass(frozen=True)
class ExpDividedDiffs:
    nodes: tuple
    dd0: complex
    dd1: complex | None
    dd2: complex | None


def _dd_series(z, order):
    """Divided difference of exp of the given order over nodes z, by Taylor series
    about their centroid."""
    c = sum(z) / len(z)
    y = [zi - c for zi in z]
    # complete homogeneous symmetric polynomials h_n(y) by the product of
    # geometric series 1/prod(1 - y_i s)
    h = np.zeros(_N_SERIES, dtype=complex)
    h[0] = 1.0
    for yi in y:
        for n in range(1, _N_SERIES):
            h[n] += yi * h[n - 1]
    total = 0j
    fact = math.factorial(order)
    for n in range(_N_SERIES):
        total += h[n] / fact
        fact *= n + order + 1
    return cmath.exp(c) * total


def _dd1_scaled(z0, z1):
    if abs(z0 - z1) < SERIES_SPREAD:
        return _dd_series([z0, z1], 1)
    return (cmath.exp(z0) - cmath.exp(z1)) / (z0 - z1)


def exp_divided_diffs(nodes, t: float) -> ExpDividedDiffs:
    """Divided differences of x -> exp(x t) over one to three nodes.

    Nodes closer than SERIES_SPREAD (after scaling by t) are handled by a
    Taylor expansion about their centroid, so confluent nodes are allowed.
    """
    nodes = [complex(x) for x in nodes]
    if not 1 <= len(nodes) <= 3:
        raise DomainError("need one to three nodes")
    if t < 0:
        raise DomainError("t must be nonnegative")
    z = [x * t for x in nodes]
    dd0 = cmath.exp(z[0])
    dd1 = dd2 = None
    if len(z) >= 2:
        dd1 = t * _dd1_scaled(z[0], z[1])
    if len(z) == 3:
        spread = max(abs(p - q) for p in z for q in z)
        if spread < SERIES_SPREAD:
            dd2 = _dd_series(z, 2)
        else:
            # isolate the node farthest from the other two and treat the rest
            # as a pair, using the symmetric pair functions
            far = max(range(3), key=lambda i: min(abs(z[i] - z[j]) for j in range(3) if j != i))
            za, zb = (z[j] for j in range(3) if j != far)
            zi = z[far]
            m = 0.5 * (za + zb)
            E = 0.5 * (cmath.exp(za) + cmath.exp(zb))
            D = _dd1_scaled(za, zb)
            dd2 = (cmath.exp(zi) - E + (m - zi) * D) / ((zi - za) * (zi - zb))
        dd2 = t * t * dd2
    return ExpDividedDiffs(tuple(z), dd0, dd1, dd2)


# ---------------------------------------------------------------------------
# vectorized pair and triple functions with real centre / real d2


def _cosh_sqrt(y):
    """cosh(sqrt(y)) for real y of either sign."""
    out = np.empty_like(y)
    pos = y >= 0
    out[pos] = np.cosh(np.sqrt(y[pos]))
    out[~pos] = np.cos(np.sqrt(-y[~pos]))
    return out


def _sinhc_sqrt(y):
    """sinh(sqrt(y))/sqrt(y) for real y of either sign, equal to 1 at y = 0."""
    out = np.empty_like(y)
    small = np.abs(y) < 1e-4
    ys = y[small]
    out[small] = 1 + ys / 6 * (1 + ys / 20 * (1 + ys / 42))
    pos = (y >= 0) & ~small
    s = np.sqrt(y[pos])
    out[pos] = np.sinh(s) / s
    neg = (y < 0) & ~small
    s = np.sqrt(-y[neg])
    out[neg] = np.sin(s) / s
    return out


def pair_functions(m, d2, prod, t):
    """E, D, Em, Ep for the pair m +- sqrt(d2) with product prod.

    Em = (l+ e^{l- t} - l- e^{l+ t})/(l+ - l-)  and
    Ep = (l+ e^{l+ t} - l- e^{l- t})/(l+ - l-).
    """
    m = np.asarray(m, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    prod = np.asarray(prod, dtype=float)
    y = d2 * t * t
    E = np.empty_like(m)
    D = np.empty_like(m)
    Em = np.empty_like(m)
    Ep = np.empty_like(m)

    split = y > 1.0
    if np.any(split):
        h = np.sqrt(d2[split])
        lam_big = m[split] - h
        lam_small = prod[split] / lam_big
        e_big = np.exp(lam_big * t)
        e_small = np.exp(lam_small * t)
        diff = lam_small - lam_big
        E[split] = 0.5 * (e_small + e_big)
        Dv = -e_small * np.expm1((lam_big - lam_small) * t) / diff
        D[split] = Dv
        Em[split] = e_small - lam_small * Dv
        Ep[split] = e_big + lam_small * Dv

    near = ~split
    if np.any(near):
        em = np.exp(m[near] * t)
        Ev = em * _cosh_sqrt(y[near])
        Dv = t * em * _sinhc_sqrt(y[near])
        E[near] = Ev
        D[near] = Dv
        Em[near] = Ev - m[near] * Dv
        Ep[near] = Ev + m[near] * Dv
    return E, D, Em, Ep


def triple_dd(lam1, m, d2, E, D, t):
    """Second divided difference of exp(. t) over {lam1, m +- sqrt(d2)}.

    E and D are the pair functions already evaluated at t.
    """
    x = (lam1 - m) * t
    y = d2 * t * t
    out = np.empty_like(x)
    small = (np.abs(x) <= 1.0) & (np.abs(y) <= 1.0)
    if np.any(small):
        xs, ys = x[small], y[small]
        # h_n(x, s, -s) with s^2 = y:  h_n = x h_{n-1} + y h_{n-2} - x y h_{n-3}
        h = [np.ones_like(xs), xs.copy(), xs * xs + ys]
        total = h[0] / 2 + h[1] / 6 + h[2] / 24
        fact = 24.0
        for n in range(3, _N_SERIES):
            hn = xs * h[-1] + ys * h[-2] - xs * ys * h[-3]
            fact *= n + 2
            total = total + hn / fact
            h = [h[1], h[2], hn]
        out[small] = t * t * np.exp(m[small] * t) * total
    big = ~small
    if np.any(big):
        num = np.exp(lam1[big] * t) - E[big] + (m[big] - lam1[big]) * D[big]
        den = (lam1[big] - m[big]) ** 2 - d2[big]
        out[big] = num / den
    return out


# ---------------------------------------------------------------------------
# coefficient arrays


def fluid_coefficients(params: PhysParams, k2, t: float):
    """Scalar fluid coefficients (Em, Ep, D) for arrays of |k|^2."""
    k2 = np.atleast_1d(np.asarray(k2, dtype=float))
    m, d2 = fluid_pair(params, k2)
    prod = params.gamma**2 * k2 + params.beta**2
    _, D, Em, Ep = pair_functions(m, d2, prod, t)
    return Em, Ep, D


def em_coefficients(params: PhysParams, k2, t: float):
    """The six EM coefficients (m11, m22, m33, m12, m13, m23) for arrays of |k|^2.

    m13 and m23 multiply i xi x (.) with xi = k/beta; the others multiply I.
    """
    k2 = np.atleast_1d(np.asarray(k2, dtype=float))
    a = params.a
    r = k2 / params.beta**2
    tau = params.beta * t
    sigma, m, d2, kind = em_pair(a, r)
    w = -2.0 * m
    with np.errstate(divide="ignore", invalid="ignore"):
        prod = np.where(sigma != 0, -a * r * r / sigma, r + 1.0)
    prod = np.where(r == 0, 1.0, prod)
    E, D, Em, _ = pair_functions(m, d2, prod, tau)
    F = triple_dd(sigma, m, d2, E, D, tau)
    alpha0 = Em + prod * F
    alpha1 = D + w * F
    alpha2 = F
    ar = a * r
    m11 = alpha0 - ar * alpha1 + (ar * ar - 1.0) * alpha2
    m12 = -alpha1 + ar * alpha2
    m13 = -alpha2
    m22 = alpha0 - (1.0 + r) * alpha2
    m23 = alpha1
    m33 = alpha0 - r * alpha2
    return m11, m22, m33, m12, m13, m23


# ---------------------------------------------------------------------------
# scalar result types


@dataclass(frozen=True)
class GreenFluid:
    """Scalar coefficients of the fluid propagator on (n, u_par, E_par).

    c_nu multiplies k.u and c_un multiplies k n (both carry -i gamma); the
    remaining coefficients multiply scalars or the identity on the k line.
    """

    c_nn: complex
    c_nu: complex
    c_un: complex
    c_uu: complex
    c_uE: complex
    c_En: complex
    c_Eu: complex
    c_EE: complex

    def matrix(self, k) -> np.ndarray:
        """The 7x7 matrix acting on (n, u_par, E_par)."""
        k = np.asarray(k, dtype=float)
        khat_outer = np.outer(k, k) / max(float(k @ k), 1e-300)
        out = np.zeros((7, 7), dtype=complex)
        out[0, 0] = self.c_nn
        out[0, 1:4] = self.c_nu * k
        out[1:4, 0] = self.c_un * k
        out[1:4, 1:4] = self.c_uu * khat_outer
        out[1:4, 4:7] = self.c_uE * khat_outer
        out[4:7, 1:4] = self.c_Eu * khat_outer
        out[4:7, 4:7] = self.c_EE * khat_outer
        return out


@dataclass(frozen=True)
class GreenEM:
    """Scalar coefficients of the EM propagator; m13, m23 multiply i xi x."""

    m11: complex
    m22: complex
    m33: complex
    m12: complex
    m13: complex
    m23: complex

    @property
    def m21(self):
        return -self.m12

    @property
    def m31(self):
        return self.m13

    @property
    def m32(self):
        return -self.m23

    def matrix(self, xi) -> np.ndarray:
        """The 9x9 matrix acting on (u_perp, E_perp, B_perp)."""
        xi = np.asarray(xi, dtype=float)
        K = 1j * cross_matrix(xi)
        I = np.eye(3)
        return np.block(
            [
                [self.m11 * I, self.m12 * I, self.m13 * K],
                [self.m21 * I, self.m22 * I, self.m23 * K],
                [self.m31 * K, self.m32 * K, self.m33 * I],
            ]
        )


@dataclass(frozen=True)
class GreenEval:
    t: float
    k: np.ndarray
    fluid: GreenFluid
    em: GreenEM | None


def cross_matrix(v) -> np.ndarray:
    """Matrix of w -> v x w."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def fluid_green(params: PhysParams, k, t: float) -> GreenFluid:
    if t < 0:
        raise DomainError("t must be nonnegative")
    k = np.asarray(k, dtype=float)
    k2 = float(k @ k)
    Em, Ep, D = (complex(v[0]) for v in fluid_coefficients(params, k2, t))
    g, b = params.gamma, params.beta
    return GreenFluid(
        c_nn=Em, c_nu=-1j * g * D, c_un=-1j * g * D, c_uu=Ep, c_uE=-b * D, c_En=0j, c_Eu=b * D, c_EE=Em
    )


def em_green(params: PhysParams, k, t: float) -> GreenEM:
    if t < 0:
        raise DomainError("t must be nonnegative")
    k = np.asarray(k, dtype=float)
    k2 = float(k @ k)
    if k2 == 0:
        raise DomainError("EM propagator needs |k| > 0")
    vals = em_coefficients(params, k2, t)
    return GreenEM(*(complex(v[0]) for v in vals))


def green_eval(params: PhysParams, k, t: float) -> GreenEval:
    k = np.asarray(k, dtype=float)
    em = em_green(params, k, t) if float(k @ k) > 0 else None
    return GreenEval(float(t), k, fluid_green(params, k, t), em)


# ---------------------------------------------------------------------------
# projections and application


def project_parallel_perp(k, v):
    k = np.asarray(k, dtype=float)
    v = np.asarray(v, dtype=complex)
    kk = float(k @ k)
    if kk == 0:
        raise DomainError("projection undefined at k = 0")
    khat = k / math.sqrt(kk)
    v_par = khat * (khat @ v)
    return v_par, v - v_par


def propagate(params: PhysParams, t: float, k, n, u, E, B, carry_steady: bool = True):
    """Apply the propagator to a batch of modes.

    k has shape (M, 3); n has shape (M,); u, E, B have shape (M, 3).
    Returns new (n, u, E, B) arrays.  Modes with k = 0 use the exact
    constant-coefficient flow (n, B fixed, (u, E) rotating at frequency beta).

    Off the constraints the fluid data is split into a Gauss-consistent part,
    propagated by the fluid coefficients, plus a multiple of the steady mode
    (n, u_par, E_par) = (1, 0, -i gamma |k|/beta), which is carried unchanged.
    The result is then exp(t L) on the whole space, so roundoff-level
    constraint residuals in the data stay at roundoff level.  With
    carry_steady=False the data is taken as Gauss-consistent and the steady
    part is dropped: this is the propagator of the constrained subspace, whose
    output keeps full relative accuracy however small it becomes.
    """
    k = np.atleast_2d(np.asarray(k, dtype=float))
    n = np.atleast_1d(np.asarray(n, dtype=complex))
    u = np.atleast_2d(np.asarray(u, dtype=complex))
    E = np.atleast_2d(np.asarray(E, dtype=complex))
    B = np.atleast_2d(np.asarray(B, dtype=complex))
    g, b = params.gamma, params.beta
    k2 = np.einsum("ij,ij->i", k, k)
    kmag = np.sqrt(k2)
    nz = kmag > 0
    safe = np.where(nz, kmag, 1.0)
    khat = k / safe[:, None]

    Em, Ep, D = fluid_coefficients(params, k2, t)
    m11, m22, m33, m12, m13, m23 = em_coefficients(params, k2, t)

    up = np.einsum("ij,ij->i", khat, u)
    ep = np.einsum("ij,ij->i", khat, E)
    bp = np.einsum("ij,ij->i", khat, B)
    steady_e = -1j * g * kmag / b
    gauss = 1j * kmag * ep + (b / g) * n
    c0 = gauss * (b * g) / (g * g * k2 + b * b) if carry_steady else np.zeros_like(n)
    nc = n - c0
    ec = ep - c0 * steady_e
    n_new = Em * nc - 1j * g * kmag * D * up + c0
    up_new = -1j * g * kmag * D * nc + Ep * up - b * D * ec
    ep_new = b * D * up + Em * ec + c0 * steady_e

    u_perp = u - khat * up[:, None]
    E_perp = E - khat * ep[:, None]
    B_perp = B - khat * bp[:, None]
    xi = k / b

    def K(v):
        return 1j * np.cross(xi, v)

    Ku, KE, KB = K(u_perp), K(E_perp), K(B_perp)
    c = lambda s: s[:, None]  # noqa: E731
    u_new = c(m11) * u_perp + c(m12) * E_perp + c(m13) * KB + khat * up_new[:, None]
    E_new = -c(m12) * u_perp + c(m22) * E_perp + c(m23) * KB + khat * ep_new[:, None]
    B_new = c(m13) * Ku - c(m23) * KE + c(m33) * B_perp + khat * bp[:, None]

    if not np.all(nz):
        z = ~nz
        cs, sn = math.cos(b * t), math.sin(b * t)
        n_new[z] = n[z]
        u_new[z] = cs * u[z] - sn * E[z]
        E_new[z] = sn * u[z] + cs * E[z]
        B_new[z] = B[z]
    return n_new, u_new, E_new, B_new


class ConstraintViolation(ValueError):
    """Raised when an input mode violates Gauss's law or solenoidality."""


def apply_green(params: PhysParams, t: float, mode0: FourierMode, tol: float = 1e-8) -> FourierMode:
    if t < 0:
        raise DomainError("t must be nonnegative")
    gres, sres, ok = check_constraints(mode0, params, tol)
    if not ok:
        raise ConstraintViolation(f"mode violates constraints (gauss={gres:.3e}, solenoidal={sres:.3e})")
    n, u, E, B = propagate(params, t, mode0.k[None, :], [mode0.n_hat], mode0.u_hat[None], mode0.E_hat[None], mode0.B_hat[None])
    return FourierMode(mode0.k, n[0], u[0], E[0], B[0])


def green_matrix(params: PhysParams, t: float, k) -> np.ndarray:
    """10x10 matrix of the assembled propagator acting on (n, u, E, B); equals exp(t L)."""
    k = np.asarray(k, dtype=float)
    I = np.eye(10, dtype=complex)
    ks = np.repeat(k[None, :], 10, axis=0)
    n, u, E, B = propagate(params, t, ks, I[:, 0], I[:, 1:4], I[:, 4:7], I[:, 7:10])
    cols = np.concatenate([n[:, None], u, E, B], axis=1)
    return cols.T


def constrained_basis(params: PhysParams, k) -> np.ndarray:
    """Orthonormal 10x8 basis of the constraint subspace at k != 0 (10x9 at k = 0)."""
    k = np.asarray(k, dtype=float)
    C = np.zeros((2, 10), dtype=complex)
    C[0, 0] = params.beta / params.gamma
    C[0, 4:7] = 1j * k
    C[1, 7:10] = k
    if float(k @ k) == 0:
        C = C[:1]
    _, s, vh = np.linalg.svd(C)
    rank = int(np.sum(s > 1e-14 * max(1.0, s.max())))
    return vh[rank:].conj().T


def constrained_component(params: PhysParams, kvecs, Y):
    """Spectral projection of states Y (M, 10) onto the constrained invariant subspace.

    Removes the steady fluid mode (1, 0, -i gamma |k|/beta khat, 0) and B_par,
    the two neutral directions that carry any constraint residual of the data.
    """
    g, b = params.gamma, params.beta
    Y = np.array(Y, dtype=complex)
    kmag = np.linalg.norm(kvecs, axis=1)
    nz = kmag > 0
    khat = np.zeros_like(kvecs)
    khat[nz] = kvecs[nz] / kmag[nz, None]
    ep = np.einsum("ij,ij->i", khat, Y[:, 4:7])
    bp = np.einsum("ij,ij->i", khat, Y[:, 7:10])
    c0 = (1j * kmag * ep + (b / g) * Y[:, 0]) * (b * g) / (g * g * kmag**2 + b * b)
    c0 = np.where(nz, c0, 0.0)
    Y[:, 0] -= c0
    Y[:, 4:7] -= (c0 * (-1j * g * kmag / b))[:, None] * khat
    Y[:, 7:10] -= bp[:, None] * khat
    return Y


# ---------------------------------------------------------------------------
# literal root-difference forms (distinct roots only), used as cross-checks


def literal_fluid_coefficients(params: PhysParams, k2: float, t: float):
    lr = fluid_roots(params, k2)
    lp, lm = lr.lambda_plus, lr.lambda_minus
    ep, em = cmath.exp(lp * t), cmath.exp(lm * t)
    d = lp - lm
    c_nn = (lp * em - lm * ep) / d
    c_uu = (lp * ep - lm * em) / d
    D = (ep - em) / d
    return c_nn, c_uu, D


def literal_em_coefficients(a: float, r: float, tau: float, roots):
    """Root-difference ratios for the six EM coefficients; roots = (l1, l2, l3)."""
    l1, l2, l3 = roots
    den = (l1 - l2) * (l2 - l3) * (l3 - l1)
    cyc = [(l1, l2, l3), (l2, l3, l1), (l3, l1, l2)]

    def total(f):
        return sum(cmath.exp(x * tau) * f(x, y, z) for x, y, z in cyc) / den

    m11 = total(lambda x, y, z: -x * (y - z) / (y + z))
    m22 = total(lambda x, y, z: x * (y * y - z * z))
    m33 = total(lambda x, y, z: -r * (y * y - z * z) / x)
    m12 = total(lambda x, y, z: x * (y - z))
    m13 = total(lambda x, y, z: (y - z))
    m23 = total(lambda x, y, z: (y * y - z * z))
    return m11, m22, m33, m12, m13, m23


__all__ = [
    "ExpDividedDiffs",
    "GreenFluid",
    "GreenEM",
    "GreenEval",
    "ConstraintViolation",
    "constrained_component",
    "exp_divided_diffs",
    "fluid_green",
    "em_green",
    "green_eval",
    "project_parallel_perp",
    "apply_green",
    "propagate",
    "green_matrix",
    "constrained_basis",
    "fluid_coefficients",
    "em_coefficients",
    "literal_fluid_coefficients",
    "literal_em_coefficients",
]
