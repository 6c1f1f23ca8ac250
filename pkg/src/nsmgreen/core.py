"""Physical parameters, normalized variables, Fourier modes and frequency regimes.

All quantities are nondimensional.  The linearized system acts on a single
Fourier mode (n, u, E, B) at wavevector k:

    dn/dt + gamma i k.u = 0
    du/dt + gamma i k n + beta E + mu |k|^2 u = 0
    dE/dt - i k x B - beta u = 0
    dB/dt + i k x E = 0

with the constraints i k.E = -(beta/gamma) n and k.B = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SQRT2_OVER_4 = math.sqrt(2.0) / 4.0
INV_SQRT5 = 1.0 / math.sqrt(5.0)


class DomainError(ValueError):
    """Raised when an input lies outside the domain of an operation."""


@dataclass(frozen=True)
class PhysParams:
    """Normalized constants gamma = sqrt(P'(n_b)), beta = sqrt(n_b), mu = nu/n_b."""

    gamma: float
    beta: float
    mu: float
    a: float = field(init=False)

    def __post_init__(self):
        for name in ("gamma", "beta", "mu"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "a", self.mu * self.beta)

    @property
    def unique_real_root_guaranteed(self) -> bool:
        return self.a <= SQRT2_OVER_4

    @property
    def discriminant_positive_all_r(self) -> bool:
        return self.a <= INV_SQRT5

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "beta": self.beta, "mu": self.mu}


P_REF = PhysParams(gamma=1.0, beta=1.0, mu=0.1)

# a = 20 is well above the threshold a ~ 14.72 beyond which the cubic
# discriminant changes sign; its zeros sit near r = 0.0945 and r = 0.0976.
P_DEGENERATE = PhysParams(gamma=1.0, beta=1.0, mu=20.0)

# Parameters for the L2 decay-rate regression.  The density response carries
# a correction of relative size gamma^2/(mu beta^2 t) and an undamped plasma
# oscillation of relative size (1 + (gamma^2/(mu beta))^2)^(-5/4); here the
# first is 1/t and the second 3e-3, so t in [50, 500] is asymptotic.  a = 0.1
# as for P_REF, with the profile width scaled by beta to match.
P_DECAY = PhysParams(gamma=1.0, beta=10.0, mu=0.01)
DECAY_WIDTH = 10.0


def rescale_to_normalized(n_b: float, Pprime_nb: float, nu: float) -> PhysParams:
    """Map the background density, pressure slope and viscosity to PhysParams."""
    for name, value in (("n_b", n_b), ("Pprime_nb", Pprime_nb), ("nu", nu)):
        if not value > 0:
            raise DomainError(f"{name} must be strictly positive, got {value!r}")
    return PhysParams(gamma=math.sqrt(Pprime_nb), beta=math.sqrt(n_b), mu=nu / n_b)


@dataclass(frozen=True)
class FourierMode:
    """State (n, u, E, B) of one Fourier mode at wavevector k."""

    k: np.ndarray
    n_hat: complex
    u_hat: np.ndarray
    E_hat: np.ndarray
    B_hat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "k", np.asarray(self.k, dtype=float).reshape(3))
        object.__setattr__(self, "n_hat", complex(self.n_hat))
        for name in ("u_hat", "E_hat", "B_hat"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=complex).reshape(3))

    @classmethod
    def zero(cls, k) -> "FourierMode":
        return cls(k, 0.0, np.zeros(3), np.zeros(3), np.zeros(3))

    @classmethod
    def from_vector(cls, k, y) -> "FourierMode":
        y = np.asarray(y, dtype=complex)
        return cls(k, y[0], y[1:4], y[4:7], y[7:10])

    def as_vector(self) -> np.ndarray:
        return np.concatenate(([self.n_hat], self.u_hat, self.E_hat, self.B_hat))

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_vector()))

    def scaled(self, factor: complex) -> "FourierMode":
        return FourierMode.from_vector(self.k, factor * self.as_vector())


def random_constrained_mode(params: PhysParams, k, rng: np.random.Generator) -> FourierMode:
    """Draw a mode satisfying Gauss's law and solenoidality.

    n, u and the perpendicular parts of E and B are drawn freely; E_par then
    follows from Gauss's law.  At k = 0 the law forces n = 0.
    """
    k = np.asarray(k, dtype=float)

    def cvec(size):
        return rng.standard_normal(size) + 1j * rng.standard_normal(size)

    u = cvec(3)
    E = cvec(3)
    B = cvec(3)
    kk = float(np.dot(k, k))
    if kk == 0.0:
        return FourierMode(k, 0.0, u, E, B)
    n = complex(cvec(1)[0])
    khat = k / math.sqrt(kk)
    E = E - khat * np.dot(khat, E)
    B = B - khat * np.dot(khat, B)
    # i k.E_par = -(beta/gamma) n  with  E_par = e khat
    e = 1j * params.beta * n / (params.gamma * math.sqrt(kk))
    E = E + e * khat
    return FourierMode(k, n, u, E, B)


def check_constraints(mode: FourierMode, params: PhysParams, tol: float = 1e-8):
    """Return (gauss_residual, solenoidal_residual, passed)."""
    gauss = abs(1j * np.dot(mode.k, mode.E_hat) + params.beta / params.gamma * mode.n_hat)
    solenoidal = abs(np.dot(mode.k, mode.B_hat))
    bound = tol * (1.0 + mode.norm())
    return float(gauss), float(solenoidal), bool(gauss <= bound and solenoidal <= bound)


REGIME_TAGS = ("D0", "D1", "Dinf")


@dataclass(frozen=True)
class RegimeLabel:
    tag: str
    eps: float
    L: float

    def __post_init__(self):
        if self.tag not in REGIME_TAGS:
            raise DomainError(f"unknown regime tag {self.tag!r}")
        if not 0 < self.eps < self.L:
            raise DomainError("regime boundaries need 0 < eps < L")


def regime_tag(kmag: float, eps: float, L: float) -> str:
    if not 0 < eps < L:
        raise DomainError(f"regime boundaries need 0 < eps < L, got eps={eps}, L={L}")
    if kmag <= eps:
        return "D0"
    if kmag >= L:
        return "Dinf"
    return "D1"


def classify_regime(params: PhysParams, k, eps: float = 0.1, L: float = 10.0) -> RegimeLabel:
    kmag = float(np.linalg.norm(np.asarray(k, dtype=float)))
    return RegimeLabel(regime_tag(kmag, eps, L), eps, L)
