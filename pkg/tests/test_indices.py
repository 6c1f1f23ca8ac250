import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nsmgreen.analysis.indices import delta_index, m_index, rate_indices
from nsmgreen.core import DomainError


def reference_m(ell, s, q):
    x = Fraction(ell) + 3 * (Fraction(1) / Fraction(s) - (0 if q == math.inf else Fraction(1) / Fraction(q)))
    if x < 0:
        return 0
    if s == 2 and q == 2 and Fraction(ell).denominator == 1:
        return int(ell)
    return math.floor(x) + 1


def test_definition_cases():
    assert m_index(0, 2, math.inf) == 2
    assert m_index(2, 2, 2) == 2
    assert m_index(Fraction(1, 2), 2, 2) == 1
    assert m_index(0, 1, 2) == 2
    assert delta_index(0, 1, 2) == 0.75
    assert delta_index(1, 2, 2) == 0.5
    assert delta_index(0, 1, math.inf) == 1.5


def test_negative_case():
    assert m_index(-2, 2, 4) == 0
    assert m_index(Fraction(-3, 4), 2, math.inf) == 1
    assert m_index(-1, 2, 2) == 0


@given(
    st.fractions(-4, 6, max_denominator=4),
    st.sampled_from([Fraction(1), Fraction(4, 3), Fraction(3, 2), Fraction(2)]),
    st.sampled_from([Fraction(2), Fraction(3), Fraction(4), Fraction(6), math.inf]),
)
def test_matches_definition(ell, s, q):
    assert m_index(ell, s, q) == reference_m(ell, s, q)


def test_rate_indices_domain():
    assert rate_indices(2, 2, 2, 0, 1) == (2, 0.75)
    for args in [(-1, 2, 2, 0, 1), (0, 3, 2, 0, 1), (0, 2, 1, 0, 1), (0, 2, 2, 0, 3), (0, 2, 2, -1, 1)]:
        with pytest.raises(DomainError):
            rate_indices(*args)
