"""Index helpers for L^p-L^q decay estimates."""

from __future__ import annotations

import math
from fractions import Fraction


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float) and math.isinf(x):
        return None
    return Fraction(x)


def _inv(x):
    f = _frac(x)
    return Fraction(0) if f is None else 1 / f


def m_index(ell, s, q) -> int:
    """Derivative count m(ell, s, q) needed to pass from L^s data to L^q decay."""
    ell_f = _frac(ell)
    x = ell_f + 3 * (_inv(s) - _inv(q))
    if x < 0:
        return 0
    if _frac(s) == 2 and _frac(q) == 2 and ell_f.denominator == 1:
        return int(ell_f)
    return math.floor(x) + 1


def delta_index(j, p, q) -> float:
    """delta(j, p, q) = j/2 + (3/2)(1/p - 1/q)."""
    return float(Fraction(j) / 2 + Fraction(3, 2) * (_inv(p) - _inv(q)))


def rate_indices(ell, s, q, j, p):
    if not (1 <= s <= 2 and 2 <= q and 1 <= p <= 2 and ell >= 0 and j >= 0):
        from ..core import DomainError

        raise DomainError("parameters outside 0 <= ell, 1 <= s <= 2 <= q, 1 <= p <= 2, j >= 0")
    return m_index(ell, s, q), delta_index(j, p, q)
