import math

import numpy as np
import pytest

from nsmgreen.analysis.decay import (
    QuadratureError,
    RadialProfile,
    fit_decay_exponent,
    l2_norm_evolution,
)
from nsmgreen.analysis.quadrature import composite_gauss_legendre, lebedev
from nsmgreen.core import P_REF, DomainError, check_constraints, FourierMode


def test_fit_exact_power_law():
    t = np.geomspace(50, 500, 40)
    fit = fit_decay_exponent(np.column_stack([t, (1 + t) ** -2.0]))
    assert fit.exponent == pytest.approx(-2.0, abs=1e-12)
    assert fit.n_points == 40
    fit = fit_decay_exponent(np.column_stack([t, 5 * (1 + t) ** -0.75]))
    assert fit.exponent == pytest.approx(-0.75, abs=1e-12)
    assert fit.log_prefactor == pytest.approx(math.log(5), abs=1e-12)
    assert fit.residual_rms < 1e-12


def test_fit_domain():
    t = np.geomspace(50, 500, 5)
    with pytest.raises(DomainError):
        fit_decay_exponent(np.column_stack([t, t]))
    t = np.geomspace(50, 500, 10)
    with pytest.raises(DomainError):
        fit_decay_exponent(np.column_stack([t, -t]))
    with pytest.raises(DomainError):
        fit_decay_exponent(t)


def test_profiles():
    with pytest.raises(DomainError):
        RadialProfile("square")
    with pytest.raises(DomainError):
        RadialProfile.source("rho")
    assert RadialProfile("bump", (2.0,)).radial([0.0, 2.0, 3.0]).tolist() == [1.0, 0.0, 0.0]
    p = RadialProfile("power_cutoff", (2.0, 5.0))
    assert p.radial([1.0, 6.0]).tolist() == [0.5, 0.0]


def test_profile_fields_satisfy_constraints(rng):
    prof = RadialProfile("gaussian", (1.0,), n_w=1.0, u_w=(1, 2, 3), E_w=(0, 1, 0), B_w=(1, 0, 1))
    k = rng.standard_normal((10, 3))
    n, u, E, B = prof.fields(P_REF, k)
    for i in range(10):
        mode = FourierMode(k[i], n[i], u[i], E[i], B[i])
        assert check_constraints(mode, P_REF, 1e-13)[2]


def test_initial_norm_matches_closed_form():
    # u = f(|k|) e1 with a unit Gaussian gives (2 pi)^-3/2 sqrt(pi^{3/2})
    out = l2_norm_evolution(P_REF, RadialProfile.source("u"), [0.0], check=False)
    assert out["u"][0] == pytest.approx((2 * math.pi) ** -1.5 * math.pi**0.75, rel=1e-10)
    assert out["n"][0] == 0.0


def test_energy_decreases():
    t = np.linspace(0, 20, 11)
    out = l2_norm_evolution(P_REF, RadialProfile.source("E"), t)
    total = sum(out[c] ** 2 for c in ("n", "u", "E", "B"))
    assert np.all(np.diff(total) <= 1e-14 * total[0])


def test_quadrature_check_raises():
    with pytest.raises(QuadratureError):
        l2_norm_evolution(P_REF, RadialProfile.source("u"), [0.0, 30.0], radial_quad=(2, None), panels=4, rtol=1e-12)


def test_quadrature_helpers_shapes():
    x, w = composite_gauss_legendre([0, 1], 4)
    assert x.shape == w.shape == (4,)
    assert lebedev(7)[0].shape == (26, 3)
