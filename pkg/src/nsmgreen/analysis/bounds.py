"""Pointwise upper-bound tables for the Green's function and ratio scans.

A table entry is a list of (power, branch) terms; the bound value is
sum |k|^power exp(-c_branch * shape_branch(k) * t) with shapes

    exp_k2: |k|^2, exp_k4: |k|^4, exp_const: 1, exp_inv_k2: |k|^-2.

The full table acts on the component magnitudes (|n|, |u|, |E|, |B|).
The fluid table acts on (n, u_par, E_par) and the electromagnetic table on
(u_perp, E_perp, B) in the rescaled variable xi = |k|/beta, with t in its
own units (the constants absorb the rescaling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core import REGIME_TAGS, DomainError, PhysParams, regime_tag
from ..greenfn import propagate
from ..spectra import em_pair, fluid_pair

BRANCHES = ("exp_k2", "exp_k4", "exp_const", "exp_inv_k2")
COMPONENTS = ("n", "u", "E", "B")
SOURCES = COMPONENTS
TABLE_SETS = ("fluid", "em", "full")

_ = None


def _table(*mats):
    """Merge (matrix of powers or None, branch) pairs into entry term lists."""
    size = len(mats[0][0])
    out = [[[] for _ in range(size)] for _ in range(size)]
    for mat, branch in mats:
        for i, row in enumerate(mat):
            for j, p in enumerate(row):
                if p is not None:
                    out[i][j].append((p, branch))
    return tuple(tuple(tuple(e) for e in row) for row in out)


FULL_TABLES = {
    "D0": _table(
        ([[0, 1, _, _], [1, 0, 0, 1], [_, 0, 0, 1], [_, 1, 1, 2]], "exp_k2"),
        ([[_, _, _, _], [_, 2, 4, 1], [_, 4, 6, 3], [_, 1, 3, 0]], "exp_k4"),
    ),
    "D1": _table(
        ([[0, 0, _, _], [0, 0, 0, 0], [_, 0, 0, 0], [_, 0, 0, 0]], "exp_const"),
    ),
    "Dinf": _table(
        ([[0, -1, _, _], [-1, -2, -2, _], [_, -2, 0, _], [_, _, _, _]], "exp_const"),
        ([[-2, -1, _, _], [-1, 0, -2, -3], [_, -2, -2, -5], [_, -3, -5, -6]], "exp_k2"),
        ([[_, _, _, _], [_, -4, -2, -2], [_, -2, 0, 0], [_, -2, 0, 0]], "exp_inv_k2"),
    ),
}

FLUID_TABLES = {
    "D0": _table(([[0, 1, _], [1, 0, 0], [_, 0, 0]], "exp_k2")),
    "D1": _table(([[0, 0, _], [0, 0, 0], [_, 0, 0]], "exp_const")),
    "Dinf": _table(
        ([[0, -1, _], [-1, -2, -2], [_, -2, 0]], "exp_const"),
        ([[-2, -1, _], [-1, 0, -2], [_, -2, -2]], "exp_k2"),
    ),
}

# powers of xi = sqrt(r): r^p -> 2p
EM_TABLES = {
    "D0": _table(
        ([[2, 4, 1], [4, 6, 3], [1, 3, 0]], "exp_k4"),
        ([[0, 0, 1], [0, 0, 1], [1, 1, 2]], "exp_k2"),
    ),
    "D1": _table(([[0, 0, 0], [0, 0, 0], [0, 0, 0]], "exp_const")),
    "Dinf": _table(
        ([[0, -2, -3], [-2, -4, -5], [-3, -5, -6]], "exp_k2"),
        ([[-4, -2, -2], [-2, 0, 0], [-2, 0, 0]], "exp_inv_k2"),
    ),
}

TABLES = {"full": FULL_TABLES, "fluid": FLUID_TABLES, "em": EM_TABLES}


@dataclass(frozen=True)
class BoundTable:
    regime: str
    entries: tuple
    table_set: str = "full"

    def __post_init__(self):
        if self.regime not in REGIME_TAGS:
            raise DomainError(f"unknown regime {self.regime!r}")
        for row in self.entries:
            for terms in row:
                for _, branch in terms:
                    if branch not in BRANCHES:
                        raise DomainError(f"unknown branch {branch!r}")

    @classmethod
    def get(cls, regime: str, table_set: str = "full") -> "BoundTable":
        if table_set not in TABLES:
            raise DomainError(f"table_set must be one of {TABLE_SETS}")
        if regime not in REGIME_TAGS:
            raise DomainError(f"unknown regime {regime!r}")
        return cls(regime, TABLES[table_set][regime], table_set)

    def structural_zeros(self):
        return [(i, j) for i, row in enumerate(self.entries) for j, t in enumerate(row) if not t]

    def evaluate(self, kmag: float, t: float, rates: dict) -> np.ndarray:
        out = np.zeros((len(self.entries), len(self.entries)))
        for i, row in enumerate(self.entries):
            for j, terms in enumerate(row):
                out[i, j] = sum(kmag**p * math.exp(-rates[b] * _shape(b, kmag) * t) for p, b in terms)
        return out


def _shape(branch, kmag):
    return {"exp_k2": kmag**2, "exp_k4": kmag**4, "exp_const": 1.0, "exp_inv_k2": kmag**-2.0}[branch]


def _min_rate(params, kmags):
    """Smallest decay rate over all linear modes at the given |k| values."""
    k2 = np.asarray(kmags, dtype=float) ** 2
    m, d2 = fluid_pair(params, k2)
    fluid = -(m + np.sqrt(np.maximum(d2, 0.0)))
    r = k2 / params.beta**2
    sigma, mm, dd, _ = em_pair(params.a, r)
    em = -params.beta * np.maximum(sigma, mm + np.sqrt(np.maximum(dd, 0.0)))
    return float(min(fluid.min(), em.min()))


def _min_fluid_rate(params, kmags):
    k2 = np.asarray(kmags, dtype=float) ** 2
    m, d2 = fluid_pair(params, k2)
    return float(np.min(-(m + np.sqrt(np.maximum(d2, 0.0)))))


@dataclass(frozen=True)
class BoundConstants:
    """Decay constants c per regime and branch, exp(-c * shape(k) * t)."""

    rates: dict = field(default_factory=dict)

    @classmethod
    def default(cls, params: PhysParams, eps: float = 0.1, L: float = 10.0) -> "BoundConstants":
        mu, beta = params.mu, params.beta
        d1 = np.geomspace(eps, L, 400)
        far = np.geomspace(L, 1e3 * L, 400)
        const_d1 = 0.5 * _min_rate(params, d1)
        const_dinf = 0.5 * _min_fluid_rate(params, far)
        rates = {
            "D0": {"exp_k2": mu / 2, "exp_k4": 0.5 * mu / beta**2, "exp_const": const_d1, "exp_inv_k2": 0.0},
            "D1": {"exp_k2": mu / 2, "exp_k4": 0.5 * mu / beta**2, "exp_const": const_d1, "exp_inv_k2": 0.0},
            "Dinf": {"exp_k2": mu / 4, "exp_k4": 0.0, "exp_const": const_dinf, "exp_inv_k2": 0.25 * beta**2 / mu},
        }
        return cls(rates)


def pointwise_bound(
    params: PhysParams,
    t: float,
    k,
    table_set: str = "full",
    constants: BoundConstants | None = None,
    eps: float = 0.1,
    L: float = 10.0,
) -> np.ndarray:
    """Bound shapes of the selected table at (t, k), unit prefactors."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    kmag = float(np.linalg.norm(np.asarray(k, dtype=float)))
    if kmag == 0:
        raise DomainError("bounds are stated for k != 0")
    regime = regime_tag(kmag, eps, L)
    constants = constants or BoundConstants.default(params, eps, L)
    x = kmag / params.beta if table_set == "em" else kmag
    return BoundTable.get(regime, table_set).evaluate(x, t, constants.rates[regime])


# ---------------------------------------------------------------------------
# ratio scans


def source_mode(params: PhysParams, source: str, k, rng):
    """Random data in one source slot; the n source carries its Gauss-law E_par."""
    k = np.asarray(k, dtype=float)
    kmag = float(np.linalg.norm(k))
    khat = k / kmag

    def cvec():
        return rng.standard_normal(3) + 1j * rng.standard_normal(3)

    def perp(v):
        return v - khat * (khat @ v)

    n = 0j
    u = np.zeros(3, complex)
    E = np.zeros(3, complex)
    B = np.zeros(3, complex)
    if source == "n":
        n = complex(rng.standard_normal(), rng.standard_normal())
        E = 1j * params.beta * n / (params.gamma * kmag) * khat
    elif source == "u":
        u = cvec()
    elif source == "E":
        E = perp(cvec())
    elif source == "B":
        B = perp(cvec())
    else:
        raise DomainError(f"unknown source {source!r}")
    return n, u, E, B


@dataclass
class RatioScanReport:
    c_fit: dict
    zero_channel_max: float
    growth_flags: list
    n_samples: int
    constants: BoundConstants


def bound_ratio_scan(
    params: PhysParams,
    t_grid,
    k_grid,
    n_modes: int = 2,
    seed: int = 0,
    constants: BoundConstants | None = None,
    eps: float = 0.1,
    L: float = 10.0,
) -> RatioScanReport:
    """Fit C = max |response| / bound for each regime, row component and source.

    The bound for a sourced mode is sum_j G_upp[i, j] |U0_j|.  Where that sum
    is structurally zero the response is collected separately, relative to
    the data norm.  Responses use the constrained-subspace propagator, so
    roundoff in the data's Gauss residual, which the steady mode would carry
    without decay, does not enter.  A pair is flagged when its largest ratio
    sits at the last time of the grid while exceeding the ratio at the
    previous time.
    """
    t_grid = np.asarray(sorted(t_grid), dtype=float)
    k_grid = np.atleast_2d(np.asarray(k_grid, dtype=float))
    constants = constants or BoundConstants.default(params, eps, L)
    rng = np.random.default_rng(seed)
    c_fit = {tag: np.zeros((4, 4)) for tag in REGIME_TAGS}
    last = {tag: np.zeros((4, 4)) for tag in REGIME_TAGS}
    prev = {tag: np.zeros((4, 4)) for tag in REGIME_TAGS}
    zero_max = 0.0
    count = 0
    for k in k_grid:
        kmag = float(np.linalg.norm(k))
        tag = regime_tag(kmag, eps, L)
        table = BoundTable.get(tag, "full")
        for s_idx, source in enumerate(SOURCES):
            for _ in range(n_modes):
                n0, u0, E0, B0 = source_mode(params, source, k, rng)
                mags0 = np.array([abs(n0), np.linalg.norm(u0), np.linalg.norm(E0), np.linalg.norm(B0)])
                norm0 = float(np.sqrt(np.sum(mags0**2)))
                for ti, t in enumerate(t_grid):
                    n, u, E, B = propagate(
                        params, float(t), k[None], [n0], u0[None], E0[None], B0[None], carry_steady=False
                    )
                    resp = np.array([abs(n[0]), np.linalg.norm(u[0]), np.linalg.norm(E[0]), np.linalg.norm(B[0])])
                    G = table.evaluate(kmag, float(t), constants.rates[tag])
                    bound = G @ mags0
                    count += 1
                    for i in range(4):
                        if bound[i] == 0:
                            zero_max = max(zero_max, resp[i] / norm0)
                            continue
                        ratio = resp[i] / bound[i]
                        c_fit[tag][i, s_idx] = max(c_fit[tag][i, s_idx], ratio)
                        if ti == len(t_grid) - 1:
                            last[tag][i, s_idx] = max(last[tag][i, s_idx], ratio)
                        elif ti == len(t_grid) - 2:
                            prev[tag][i, s_idx] = max(prev[tag][i, s_idx], ratio)
    flags = []
    for tag in REGIME_TAGS:
        for i in range(4):
            for j in range(4):
                c = c_fit[tag][i, j]
                if c > 0 and last[tag][i, j] >= c and last[tag][i, j] > prev[tag][i, j]:
                    flags.append((tag, COMPONENTS[i], SOURCES[j]))
    return RatioScanReport(c_fit, zero_max, flags, count, constants)


def c_fit_drift(report_a: RatioScanReport, report_b: RatioScanReport) -> float:
    """Largest relative change of any nonzero fitted constant between two scans."""
    worst = 0.0
    for tag in REGIME_TAGS:
        a, b = report_a.c_fit[tag], report_b.c_fit[tag]
        mask = (a > 0) | (b > 0)
        if np.any(mask):
            worst = max(worst, float(np.max(np.abs(b[mask] - a[mask]) / np.maximum(a[mask], b[mask]))))
    return worst


def slow_branch_rate(params: PhysParams, kmag: float, n_times: int = 40) -> float:
    """Fitted decay rate of |B(t)| for pure B data at |k| on its slow time scale."""
    k = np.array([0.0, 0.0, kmag])
    B0 = np.array([1.0, 0.0, 0.0], dtype=complex)
    r = kmag**2 / params.beta**2
    t_scale = 1.0 / (params.beta * params.a * r * r)
    # start once the e^{-mu k^2 t/2} branches have died out
    t_fast = 40.0 / (params.mu * kmag**2)
    t = np.linspace(t_fast, t_fast + t_scale, n_times)
    z3 = np.zeros((len(t), 3), complex)
    vals = []
    for ti in t:
        _, _, _, B = propagate(params, float(ti), k[None], [0j], z3[:1], z3[:1], B0[None])
        vals.append(np.linalg.norm(B[0]))
    slope = np.polyfit(t, np.log(vals), 1)[0]
    return float(-slope)


def slow_branch_scaling(params: PhysParams, k_small: float = 0.05, k_large: float = 0.1):
    """Observed rate ratio against the |k|^4 prediction (k_large/k_small)^4."""
    ratio = slow_branch_rate(params, k_large) / slow_branch_rate(params, k_small)
    expected = (k_large / k_small) ** 4
    return ratio, expected, abs(ratio / expected - 1.0)
