"""Roots of the fluid quadratic and the electromagnetic cubic.

Fluid part: z^2 + mu k2 z + (gamma^2 k2 + beta^2) = 0.
EM part, in the rescaled variables tau = beta t, xi = k/beta, r = |xi|^2:

    g(z) = z^3 + a r z^2 + (r + 1) z + a r^2 = 0.

Every root pair is also returned in "centre and squared half-spread" form
(m, d2): the pair is m +- sqrt(d2) with d2 real.  The Green's function
assembly only uses even functions of sqrt(d2), which keeps it stable when
the two roots coalesce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .core import INV_SQRT5, DomainError, PhysParams

DEGENERACY_REL = 1e-8
ORIGIN_WINDOW = 0.1
INFINITY_WINDOW = 100.0

ONE_REAL, THREE_REAL, DEGENERATE = "one_real", "three_real", "degenerate"
KIND_NAMES = (ONE_REAL, THREE_REAL, DEGENERATE)


@dataclass(frozen=True)
class QuadraticRoots:
    lambda_plus: complex
    lambda_minus: complex
    psi: float
    k2: float


@dataclass(frozen=True)
class CubicRoots:
    lambda1: complex
    lambda2: complex
    lambda3: complex
    r: float
    S: float
    R: float
    kind: str
    a: float
    sigma_plus_ar: float

    @property
    def roots(self) -> np.ndarray:
        return np.array([self.lambda1, self.lambda2, self.lambda3])


# ---------------------------------------------------------------------------
# fluid quadratic


def fluid_pair(params: PhysParams, k2):
    """Centre m and squared half-spread d2 = psi/4 of the fluid roots."""
    k2 = np.asarray(k2, dtype=float)
    m = -0.5 * params.mu * k2
    d2 = 0.25 * (params.mu**2 * k2**2) - (params.gamma**2 * k2 + params.beta**2)
    return m, d2


def fluid_roots(params: PhysParams, k2: float) -> QuadraticRoots:
    if k2 < 0:
        raise DomainError("k2 must be nonnegative")
    s = -params.mu * k2
    p = params.gamma**2 * k2 + params.beta**2
    psi = params.mu**2 * k2**2 - 4.0 * p
    if psi < 0:
        half = 0.5 * math.sqrt(-psi)
        lp = complex(0.5 * s, half)
        lm = complex(0.5 * s, -half)
    else:
        # the larger-magnitude root first, the other from the product
        lm = 0.5 * (s - math.sqrt(psi))
        lp = p / lm
        lp, lm = complex(lp), complex(lm)
    return QuadraticRoots(lp, lm, float(psi), float(k2))


# ---------------------------------------------------------------------------
# cubic discriminant


def cubic_discriminant(a, r):
    """(S, R) with R in the expanded form; R > 0 means one real root."""
    a = np.asarray(a, dtype=float)
    r = np.asarray(r, dtype=float)
    S = 2 * a**3 * r**3 - 9 * a * r * (r + 1) + 27 * a * r**2
    R = 27 * (4 * (1 + r) ** 3 + a**2 * r**2 * (8 * r**2 - 20 * r - 1) + 4 * a**4 * r**5)
    if S.ndim == 0:
        return float(S), float(R)
    return S, R


def cubic_discriminant_resolvent(a, r):
    """R as S^2 - 4 Delta0^3 with Delta0 = c2^2 - 3 c1 (unexpanded form)."""
    S, _ = cubic_discriminant(a, r)
    delta0 = (a * r) ** 2 - 3 * (r + 1)
    return S * S - 4 * delta0**3


def degeneracy_threshold(r):
    return DEGENERACY_REL * 108.0 * (1.0 + np.asarray(r, dtype=float)) ** 3


# ---------------------------------------------------------------------------
# cubic roots (vectorized core)


def _newton_safeguarded(f, fp, x, lo, hi, iters=60):
    """Newton iteration kept inside [lo, hi], falling back to bisection."""
    flo = f(lo)
    for _ in range(iters):
        fx = f(x)
        same = np.sign(fx) == np.sign(flo)
        lo = np.where(same, x, lo)
        flo = np.where(same, fx, flo)
        hi = np.where(same, hi, x)
        d = fp(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = fx / d
        xn = x - step
        bad = ~np.isfinite(xn) | (xn < np.minimum(lo, hi)) | (xn > np.maximum(lo, hi))
        xn = np.where(bad, 0.5 * (lo + hi), xn)
        done = np.abs(xn - x) <= 4 * np.finfo(x.dtype).eps * np.abs(xn)
        x = xn
        if np.all(done | (fx == 0)):
            break
    return x


def cubic_core(a: float, r):
    """Vectorized solve of g(z) = 0.

    Returns sigma (isolated real root), w = sigma + a r, p (product of the
    remaining pair), S, R and an integer kind code (index into KIND_NAMES).
    sigma is polished in the g form, w in the shifted form
    h(w) = w (w - a r)^2 + (r + 1) w - a r, so both are accurate to a few
    ulp at every r.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    S, R = cubic_discriminant(a, r)
    S = np.atleast_1d(S)
    R = np.atleast_1d(R)
    kind = np.where(R > 0, 0, 1)
    kind = np.where(np.abs(R) <= degeneracy_threshold(r), 2, kind)

    ar = a * r
    c2, c1, c0 = ar, r + 1.0, a * r * r
    delta0 = c2 * c2 - 3.0 * c1

    sigma0 = np.empty_like(r)
    lo = np.empty_like(r)
    hi = np.empty_like(r)

    one = R > 0
    if np.any(one):
        sq = np.sqrt(R[one])
        Sx = S[one]
        C = np.cbrt(0.5 * (Sx + np.where(Sx >= 0, sq, -sq)))
        with np.errstate(divide="ignore", invalid="ignore"):
            D = np.where(C != 0, delta0[one] / C, 0.0)
        guess = -(c2[one] + C + D) / 3.0
        lo[one] = -ar[one]
        hi[one] = -c0[one] / c1[one]
        bad = ~((guess > lo[one]) & (guess < hi[one]))
        sigma0[one] = np.where(bad, hi[one], guess)

    three = ~one
    if np.any(three):
        d0 = delta0[three]
        with np.errstate(invalid="ignore"):
            cos_arg = np.clip(S[three] / np.sqrt(S[three] ** 2 - R[three]), -1.0, 1.0)
        theta = np.arccos(cos_arg)
        j = np.arange(3)[:, None]
        roots = -(c2[three] + 2.0 * np.sqrt(d0) * np.cos((theta + 2 * np.pi * j) / 3.0)) / 3.0
        roots = np.sort(roots, axis=0)
        gap_low = roots[1] - roots[0]
        gap_high = roots[2] - roots[1]
        pick_low = gap_low >= gap_high
        chosen = np.where(pick_low, roots[0], roots[2])
        gap = np.maximum(gap_low, gap_high)
        sigma0[three] = chosen
        lo[three] = chosen - 0.5 * gap
        hi[three] = chosen + 0.5 * gap
        lo[three] = np.maximum(lo[three], -ar[three])
        hi[three] = np.minimum(hi[three], -c0[three] / c1[three])

    ld = np.longdouble
    A = ld(a)
    rl = r.astype(ld)
    arl = A * rl
    c1l = rl + 1
    c0l = A * rl * rl

    def g(z):
        return ((z + arl) * z + c1l) * z + c0l

    def gp(z):
        return (3 * z + 2 * arl) * z + c1l

    def h(w):
        q = w - arl
        return w * q * q + c1l * w - arl

    def hp(w):
        q = w - arl
        return q * q + 2 * w * q + c1l

    sig = _newton_safeguarded(g, gp, sigma0.astype(ld), lo.astype(ld), hi.astype(ld))
    w = _newton_safeguarded(
        h, hp, sig + arl, lo.astype(ld) + arl, (hi.astype(ld) + arl)
    )
    zero = r == 0
    sigma = np.where(zero, 0.0, sig.astype(float))
    w = np.where(zero, 0.0, w.astype(float))
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(sigma != 0, -c0 / sigma, c1)
    p = np.where(zero, 1.0, p)
    return sigma, w, p, S, R, kind


def em_pair(a: float, r):
    """sigma and the remaining pair as centre m and squared half-spread d2."""
    sigma, w, p, S, R, kind = cubic_core(a, r)
    m = -0.5 * w
    d2 = 0.25 * w * w - p
    return sigma, m, d2, kind


def em_cubic_roots(a: float, r: float) -> CubicRoots:
    if a <= 0 or r < 0:
        raise DomainError("need a > 0 and r >= 0")
    sigma, w, p, S, R, kind = cubic_core(a, r)
    sigma, w, p = float(sigma[0]), float(w[0]), float(p[0])
    S, R, kind = float(S[0]), float(R[0]), KIND_NAMES[int(kind[0])]
    m = -0.5 * w
    d2 = 0.25 * w * w - p
    if d2 < 0:
        half = math.sqrt(-d2)
        pair = (complex(m, half), complex(m, -half))
    else:
        half = math.sqrt(d2)
        # larger-magnitude root directly, the other from the product
        big = m - half
        pair = (complex(p / big) if big != 0 else complex(m), complex(big))
    if kind == THREE_REAL:
        lams = sorted([complex(sigma), *pair], key=lambda z: (z.real, z.imag))
    else:
        lams = [complex(sigma), *pair]
    return CubicRoots(lams[0], lams[1], lams[2], float(r), S, R, kind, float(a), w)


def phi_value(a: float, r, w):
    """phi = 3 sigma^2 + 2 a r sigma - a^2 r^2 + 4(r+1), written in w = sigma + a r."""
    r = np.asarray(r, dtype=float)
    w = np.asarray(w, dtype=float)
    return 3 * w * w - 4 * a * r * w + 4 * (r + 1)


def root_asymptotics(a: float, r: float, end: str, window: float | None = None) -> CubicRoots:
    """Truncated series for the cubic roots near r = 0 or r = infinity."""
    if end == "origin":
        lim = ORIGIN_WINDOW if window is None else window
        if not 0 < r <= lim:
            raise DomainError(f"origin series valid for 0 < r <= {lim}")
        sigma = -a * r * r * (1 - r)
        re_chi = -a * r * (1 - r) / 2
        im_chi = math.sqrt(1 + r)
        w = a * r - a * r * r * (1 - r)
    elif end == "infinity":
        lim = INFINITY_WINDOW if window is None else window
        if not r >= lim:
            raise DomainError(f"infinity series valid for r >= {lim}")
        w = (1 / (a * r)) * (1 - 1 / (a * a * r))
        sigma = -a * r + w
        re_chi = -w / 2
        im_chi = math.sqrt(r)
    else:
        raise DomainError(f"end must be 'origin' or 'infinity', got {end!r}")
    S, R = cubic_discriminant(a, r)
    kind = ONE_REAL if R > degeneracy_threshold(r) else (THREE_REAL if R < -degeneracy_threshold(r) else DEGENERATE)
    return CubicRoots(
        complex(sigma), complex(re_chi, im_chi), complex(re_chi, -im_chi), float(r), S, R, kind, float(a), float(w)
    )


def discriminant_zero_set(a: float, eps: float, L: float, n_scan: int = 20000) -> list[float]:
    """Sign changes of R(a, .) on [eps, L], bisected to 1e-12 in r."""
    if not 0 < eps < L:
        raise DomainError("need 0 < eps < L")
    if a <= INV_SQRT5:
        return []
    grid = np.geomspace(eps, L, n_scan)
    _, R = cubic_discriminant(a, grid)
    sgn = np.sign(R)
    zeros = []
    for i in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
        zeros.append(brentq(lambda x: cubic_discriminant(a, x)[1], grid[i], grid[i + 1], xtol=1e-13))
    zeros.extend(float(x) for x in grid[sgn == 0])
    return sorted(zeros)
