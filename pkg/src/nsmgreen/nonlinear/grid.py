"""Periodic grid, spectral operators and the solver state."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..core import DomainError


class StateError(RuntimeError):
    """The state left the admissible region (vacuum guard or blow-up)."""


@dataclass(frozen=True)
class GridConfig:
    n_per_axis: int = 32
    box_length: float = 2 * math.pi
    dealias_fraction: float = 2.0 / 3.0
    dt: float = 0.1
    t_end: float = 20.0
    pressure_index: float = 5.0 / 3.0
    amplitude: float = 1e-3

    def __post_init__(self):
        n = self.n_per_axis
        if n < 16 or n & (n - 1):
            raise DomainError("n_per_axis must be a power of two >= 16")
        if not self.box_length > 0:
            raise DomainError("box_length must be positive")
        if not 0.5 < self.dealias_fraction <= 1.0:
            raise DomainError("dealias_fraction must lie in (0.5, 1]")
        if not (self.dt > 0 and self.t_end > 0):
            raise DomainError("dt and t_end must be positive")
        if not self.pressure_index > 1:
            raise DomainError("pressure_index must exceed 1")
        if not self.amplitude >= 0:
            raise DomainError("amplitude must be nonnegative")


@dataclass(frozen=True)
class GridState:
    """Real fields rho (N,N,N) and v, Et, Bt (3,N,N,N) at a given time."""

    rho: np.ndarray
    v: np.ndarray
    Et: np.ndarray
    Bt: np.ndarray
    time: float = 0.0

    @classmethod
    def zeros(cls, n: int) -> "GridState":
        z = np.zeros((n, n, n))
        return cls(z, np.zeros((3, n, n, n)), np.zeros((3, n, n, n)), np.zeros((3, n, n, n)))

    def scaled(self, factor: float) -> "GridState":
        return replace(self, rho=factor * self.rho, v=factor * self.v, Et=factor * self.Et, Bt=factor * self.Bt)

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(a)) for a in (self.rho, self.v, self.Et, self.Bt)))


@dataclass(frozen=True)
class Spectral:
    """Wavevectors and masks for a grid."""

    k: np.ndarray  # (3, N, N, N)
    k2: np.ndarray
    mask: np.ndarray
    n: int

    @classmethod
    def build(cls, config: GridConfig) -> "Spectral":
        n = config.n_per_axis
        k1 = 2 * math.pi / config.box_length * np.fft.fftfreq(n, 1.0 / n)
        k = np.array(np.meshgrid(k1, k1, k1, indexing="ij"))
        m = np.abs(np.fft.fftfreq(n, 1.0 / n))
        keep = m <= config.dealias_fraction * (n // 2) - 1e-9
        if config.dealias_fraction == 1.0:
            keep = m < n // 2
        mask = keep[:, None, None] & keep[None, :, None] & keep[None, None, :]
        return cls(k, np.sum(k * k, axis=0), mask, n)

    def fft(self, f):
        return np.fft.fftn(f, axes=(-3, -2, -1)) * self.mask

    def ifft(self, fh):
        return np.fft.ifftn(fh, axes=(-3, -2, -1)).real

    def grad(self, fh):
        return 1j * self.k * fh[None]

    def div(self, vh):
        return np.sum(1j * self.k * vh, axis=0)

    def curl(self, vh):
        k = self.k
        return 1j * np.array([k[1] * vh[2] - k[2] * vh[1], k[2] * vh[0] - k[0] * vh[2], k[0] * vh[1] - k[1] * vh[0]])


def to_spectral(state: GridState, sp: Spectral):
    return sp.fft(state.rho), sp.fft(state.v), sp.fft(state.Et), sp.fft(state.Bt)


def from_spectral(fields, sp: Spectral, time: float) -> GridState:
    nh, vh, Eh, Bh = fields
    return GridState(sp.ifft(nh), sp.ifft(vh), sp.ifft(Eh), sp.ifft(Bh), float(time))


def l2(f, box_length: float) -> float:
    """Continuous L2 norm of a periodic grid field (scalar or vector)."""
    cell = (box_length / f.shape[-1]) ** 3
    return float(math.sqrt(np.sum(f * f) * cell))
