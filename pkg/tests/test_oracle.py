import math

import numpy as np
import pytest

from nsmgreen.core import P_DEGENERATE, P_REF, DomainError, FourierMode, check_constraints, random_constrained_mode
from nsmgreen.greenfn import apply_green
from nsmgreen.oracle import (
    degenerate_samples,
    direction_samples,
    generator,
    integrate_batch,
    integrate_mode,
    max_workers,
    verify_green_vs_oracle,
)


def test_origin_rotation():
    m = FourierMode([0, 0, 0], 0.0, [1, 0, 0], np.zeros(3), np.zeros(3))
    out = integrate_mode(P_REF, m, math.pi / 2, tol=1e-12)
    # du/dt = -beta E, dE/dt = beta u: the velocity turns into +E
    assert np.allclose(out.u_hat, 0, atol=1e-10)
    assert np.allclose(out.E_hat, [1, 0, 0], atol=1e-10)


def test_zero_time_and_tolerance_domain(rng):
    m = random_constrained_mode(P_REF, [0.3, 0.1, 0.2], rng)
    assert np.array_equal(integrate_mode(P_REF, m, 0.0).as_vector(), m.as_vector())
    with pytest.raises(DomainError):
        integrate_mode(P_REF, m, 1.0, tol=1e-3)
    with pytest.raises(DomainError):
        integrate_mode(P_REF, m, -1.0)


def test_constraints_preserved_without_projection(rng):
    tol = 1e-10
    m = random_constrained_mode(P_REF, [0.7, -0.4, 1.1], rng)
    out = integrate_mode(P_REF, m, 10.0, tol)
    g, s, _ = check_constraints(out, P_REF)
    assert g <= 100 * tol * m.norm() and s <= 100 * tol * m.norm()


def test_generator_structure():
    L = generator(P_REF, [0.6, 0, 0.8])
    # anti-Hermitian apart from the viscous block
    D = L + L.conj().T
    D[1:4, 1:4] = 0
    assert np.allclose(D, 0)
    assert np.allclose(np.diag(L)[1:4], -P_REF.mu)


def test_energy_identity_in_oracle(rng):
    tol = 1e-10
    k = np.array([0.5, 0.5, 0.5])
    m = random_constrained_mode(P_REF, k, rng)
    states, diss = integrate_batch(P_REF, k[None], m.as_vector()[None, :, None], [0.0, 5.0], tol, track_dissipation=True)
    lhs = np.linalg.norm(states[-1, 0, :, 0]) ** 2 + diss[-1, 0, 0]
    assert lhs == pytest.approx(m.norm() ** 2, rel=100 * tol)


def test_oracle_self_convergence(rng):
    k = np.array([1.0, 2.0, 0.5])
    m = random_constrained_mode(P_REF, k, rng)
    exact = apply_green(P_REF, 5.0, m).as_vector()
    errs = [np.linalg.norm(integrate_mode(P_REF, m, 5.0, tol).as_vector() - exact) for tol in (1e-7, 1e-8)]
    assert errs[1] < errs[0]


def test_single_sample_at_zero_time():
    rep = verify_green_vs_oracle(P_REF, [[0.3, 0.2, 0.1]], [0.0])
    assert rep.max_rel_error <= 1e-14
    assert rep.n_samples == 3


def test_small_verification_run():
    rep = verify_green_vs_oracle(P_REF, direction_samples(6, 2, seed=4), [0.1, 1, 10, 100])
    assert rep.max_rel_error <= 1e-7
    assert rep.worst_case[0] in (0.1, 1, 10, 100)
    assert rep.n_samples == 6 * 2 * 4 * 3


def test_parallel_matches_serial():
    ks = direction_samples(4, 4, seed=2)
    a = verify_green_vs_oracle(P_REF, ks, [1.0, 10.0], chunk=4, workers=1)
    b = verify_green_vs_oracle(P_REF, ks, [1.0, 10.0], chunk=4, workers=2)
    assert a == b


def test_degenerate_samples_and_metric():
    ks, rs = degenerate_samples(P_DEGENERATE)
    assert len(rs) == 2 * 5 and len(ks) == 4 * len(rs)
    assert np.allclose(np.linalg.norm(ks, axis=1), np.repeat(P_DEGENERATE.beta * np.sqrt(rs), 4))
    with pytest.raises(DomainError):
        verify_green_vs_oracle(P_REF, ks[:1], [1.0], metric="bogus")
    with pytest.raises(DomainError):
        verify_green_vs_oracle(P_REF, [], [1.0])


def test_max_workers_env(monkeypatch):
    monkeypatch.setenv("NSM_THREADS", "3")
    assert max_workers() == 3
    monkeypatch.setenv("NSM_THREADS", "x")
    assert max_workers() == 1
