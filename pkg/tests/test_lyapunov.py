import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsmgreen.analysis.lyapunov import (
    LyapunovWeights,
    SEARCH_EXPONENTS,
    choose_weights,
    default_k_grid,
    dissipation_check,
    energy_rate,
    exact_margin,
    lyapunov_matrix,
    lyapunov_value,
    trajectory_bound_violation,
)
from nsmgreen.core import P_REF, DomainError, PhysParams, random_constrained_mode


def test_weights_domain():
    LyapunovWeights(0.5, 0.5)
    LyapunovWeights(0.0, 0.0)
    for bad in [(-0.1, 0.1), (0.1, 0.6)]:
        with pytest.raises(DomainError):
            LyapunovWeights(*bad)
    assert 2.0 ** -min(SEARCH_EXPONENTS) < 0.5


def test_equivalence_constants(rng):
    w = LyapunovWeights(0.25, 0.25)
    for _ in range(30):
        k = rng.standard_normal(3) * 10 ** rng.uniform(-2, 2)
        mode = random_constrained_mode(P_REF, k, rng)
        e = lyapunov_value(P_REF, w, mode)
        n2 = mode.norm() ** 2
        assert w.c_eq(P_REF) * n2 <= e * (1 + 1e-12)
        assert e <= w.C_eq(P_REF) * n2 * (1 + 1e-12)


def test_hermitian():
    Q = lyapunov_matrix(P_REF, LyapunovWeights(0.2, 0.3), [0.3, -1.0, 2.0])
    assert np.allclose(Q, Q.conj().T, atol=0)


def test_plain_energy_identity(rng):
    # with kappa1 = 0 the functional is |U|^2 and -dE/dt = 2 mu |k|^2 |u|^2
    w = LyapunovWeights(0.0, 0.0)
    k = np.array([0.4, 0.1, -0.7])
    mode = random_constrained_mode(P_REF, k, rng)
    rate = energy_rate(P_REF, w, mode)
    expected = -2 * P_REF.mu * (k @ k) * np.linalg.norm(mode.u_hat) ** 2
    assert rate == pytest.approx(expected, rel=1e-12)


def test_exact_and_centered_derivatives_agree(rng):
    w = LyapunovWeights(0.125, 0.25)
    k = np.array([0.6, 0.0, 0.8])
    mode = random_constrained_mode(P_REF, k, rng)
    t = np.linspace(0.5, 5.0, 10)
    exact = dissipation_check(P_REF, w, k, mode, t, "exact")
    centered = dissipation_check(P_REF, w, k, mode, t, "centered", refine=50)
    assert centered == pytest.approx(exact, rel=1e-4)
    assert exact >= exact_margin(P_REF, w, k) - 1e-12
    with pytest.raises(DomainError):
        dissipation_check(P_REF, w, k, mode, t, "forward")
    with pytest.raises(DomainError):
        dissipation_check(P_REF, w, k, mode, [0.0, 1.0], "exact")


@settings(max_examples=15)
@given(st.floats(0.5, 4.0), st.floats(-1, 1))
def test_margin_invariant_under_field_scaling(scale, logk):
    # the margin is a generalized eigenvalue, so it ignores mode amplitude
    # and depends on k only through |k| (rotation invariance)
    w = LyapunovWeights(0.125, 0.125)
    k = 10**logk * np.array([0.0, 0.6, 0.8])
    R = np.array([[0, 0, 1.0], [1.0, 0, 0], [0, 1.0, 0]])
    assert exact_margin(P_REF, w, k) == pytest.approx(exact_margin(P_REF, w, R @ k), rel=1e-9, abs=1e-13)


def test_choose_weights_reference():
    grid = default_k_grid()
    w, margin = choose_weights(P_REF, grid)
    assert margin > 0
    assert w.c_eq(P_REF) > 0
    assert all(exact_margin(P_REF, w, k) >= margin - 1e-14 for k in grid)
    with pytest.raises(DomainError):
        choose_weights(P_REF, np.zeros((0, 3)))


def test_trajectory_bound():
    grid = default_k_grid(12)
    w, margin = choose_weights(P_REF, grid)
    t = np.linspace(0, 100, 21)
    for k in grid:
        assert trajectory_bound_violation(P_REF, w, margin, k, t) <= 1 + 1e-12


def test_other_parameters_margin():
    p = PhysParams(2.0, 0.5, 0.3)
    w, margin = choose_weights(p, default_k_grid(20))
    assert margin > 0
    assert w.c_eq(p) > 0
