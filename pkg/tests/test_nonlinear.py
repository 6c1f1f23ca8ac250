import math
from dataclasses import replace

import numpy as np
import pytest

from nsmgreen.analysis.lyapunov import LyapunovWeights
from nsmgreen.core import P_REF, DomainError, random_constrained_mode
from nsmgreen.nonlinear import (
    GridConfig,
    GridState,
    compatibility_residual,
    constraint_project,
    constraint_residuals,
    energy_functionals,
    linear_solution,
    mode_energy_matrix,
    nonlinear_rhs,
    random_state,
    simulate,
    step_etd,
)

CFG = GridConfig(n_per_axis=16, dt=0.1, t_end=1.0)


def single_mode_state(cfg, kint, U):
    """Real fields 2 Re(U exp(i k.x)) at the integer wavevector kint."""
    n = cfg.n_per_axis
    x = np.arange(n) * cfg.box_length / n
    X = np.array(np.meshgrid(x, x, x, indexing="ij"))
    k = 2 * math.pi / cfg.box_length * np.asarray(kint, float)
    phase = np.exp(1j * np.einsum("i,ijkl->jkl", k, X))
    f = lambda c: 2 * np.real(c * phase)
    return GridState(f(U[0]), np.array([f(c) for c in U[1:4]]), np.array([f(c) for c in U[4:7]]), np.array([f(c) for c in U[7:10]]))


def test_config_domain():
    for bad in [dict(n_per_axis=24), dict(n_per_axis=8), dict(dt=0.0), dict(dealias_fraction=0.4), dict(pressure_index=1.0)]:
        with pytest.raises(DomainError):
            GridConfig(**bad)


def test_zero_state_is_steady():
    st = GridState.zeros(16)
    h1, h2, h3 = nonlinear_rhs(P_REF, st, CFG)
    assert np.all(h1 == 0) and np.all(h2 == 0) and np.all(h3 == 0)
    out = step_etd(P_REF, st, CFG)
    assert out.max_abs() == 0.0
    assert out.time == pytest.approx(0.1)


def test_constraint_projection():
    rng = np.random.default_rng(3)
    shape = (16, 16, 16)
    st = GridState(rng.standard_normal(shape), rng.standard_normal((3,) + shape), rng.standard_normal((3,) + shape), rng.standard_normal((3,) + shape))
    st = replace(st, rho=st.rho - st.rho.mean(), Et=st.Et - st.Et.mean(axis=(1, 2, 3), keepdims=True))
    p = constraint_project(st, P_REF, CFG)
    g, b = constraint_residuals(P_REF, p, CFG)
    assert g < 1e-13 and b < 1e-13
    q = constraint_project(p, P_REF, CFG)
    for a, c in [(p.rho, q.rho), (p.v, q.v), (p.Et, q.Et), (p.Bt, q.Bt)]:
        assert np.max(np.abs(a - c)) < 1e-14 * max(1.0, np.max(np.abs(a)))


def test_projection_keeps_constrained_data():
    st = random_state(P_REF, CFG, seed=1)
    p = constraint_project(st, P_REF, CFG)
    assert np.max(np.abs(p.Et - st.Et)) < 1e-14
    assert np.max(np.abs(p.Bt - st.Bt)) < 1e-14


def test_random_state_properties():
    st = random_state(P_REF, CFG, seed=2)
    assert st.max_abs() == pytest.approx(CFG.amplitude, rel=1e-12)
    assert abs(st.rho.mean()) < 1e-18
    assert all(np.isrealobj(a) for a in (st.rho, st.v, st.Et, st.Bt))
    g, b = constraint_residuals(P_REF, st, CFG)
    assert g < 1e-12 and b < 1e-12


def test_compatibility_residual():
    st = random_state(P_REF, replace(CFG, amplitude=0.1), seed=0)
    assert compatibility_residual(P_REF, st, CFG) < 1e-10


def test_single_mode_energy_matches_mode_form():
    cfg = GridConfig(n_per_axis=16)
    kint = (1, 0, 2)
    k = 2 * math.pi / cfg.box_length * np.array(kint, float)
    U = random_constrained_mode(P_REF, k, np.random.default_rng(5)).as_vector() * 1e-3
    st = single_mode_state(cfg, kint, U)
    w = LyapunovWeights(0.125, 0.25)
    rep = energy_functionals(P_REF, st, 4, w, cfg)
    for value, high in [(rep.E_N, False), (rep.E_N_h, True)]:
        Q = mode_energy_matrix(P_REF, w, k, 4, high)
        expected = 2 * cfg.box_length**3 * float(np.real(np.vdot(U, Q @ U)))
        assert value == pytest.approx(expected, rel=1e-12)


def test_plain_energy_is_l2():
    st = random_state(P_REF, CFG, seed=4)
    rep = energy_functionals(P_REF, st, 1, LyapunovWeights(0.0, 0.0), CFG)
    cell = (CFG.box_length / 16) ** 3
    l2sq = cell * sum(np.sum(a * a) for a in (st.rho, st.v, st.Et, st.Bt))
    assert rep.E_N > l2sq
    with pytest.raises(DomainError):
        energy_functionals(P_REF, st, 5, LyapunovWeights(0.0, 0.0), CFG)


def test_linear_solution_matches_small_amplitude_step():
    st = random_state(P_REF, replace(CFG, amplitude=1e-8), seed=0)
    a = step_etd(P_REF, st, CFG, 0.01)
    b = linear_solution(P_REF, st, CFG, 0.01)
    diff = max(np.max(np.abs(x - y)) for x, y in [(a.rho, b.rho), (a.v, b.v), (a.Et, b.Et), (a.Bt, b.Bt)])
    assert diff < 1e-14


def test_small_simulation():
    res = simulate(P_REF, CFG, diagnostics_stride=2, seed=0)
    s = res.series
    assert res.n_steps == 10
    assert len(s["t"]) == 6
    assert np.max(s["mass_drift"]) <= 1e-12
    assert np.max(s["gauss_residual"]) <= 1e-10
    assert np.max(s["divB_residual"]) <= 1e-10
    assert res.max_energy_increase() <= 1e-8
    assert np.isrealobj(res.final.rho)


def test_simulate_rejects_bad_initial():
    with pytest.raises(DomainError):
        simulate(P_REF, CFG, initial="random")
    with pytest.raises(DomainError):
        simulate(P_REF, CFG, diagnostics_stride=0)
