import numpy as np
import pytest

from nsmgreen.analysis.bounds import (
    BoundConstants,
    BoundTable,
    bound_ratio_scan,
    c_fit_drift,
    pointwise_bound,
    slow_branch_scaling,
    source_mode,
)
from nsmgreen.core import P_REF, DomainError, FourierMode, check_constraints
from nsmgreen.oracle import direction_samples


def test_structural_zeros():
    # density never couples directly to E or B, and B only reaches n through u
    assert BoundTable.get("D1").structural_zeros() == [(0, 2), (0, 3), (2, 0), (3, 0)]
    assert BoundTable.get("D0", "fluid").structural_zeros() == [(0, 2), (2, 0)]
    assert BoundTable.get("D1", "em").structural_zeros() == []


def test_table_domain():
    with pytest.raises(DomainError):
        BoundTable.get("D2")
    with pytest.raises(DomainError):
        BoundTable.get("D0", "maxwell")
    with pytest.raises(DomainError):
        BoundTable("D0", ((((0, "exp_k3"),),),))


def test_pointwise_bound_shapes():
    G = pointwise_bound(P_REF, 0.0, [0, 0, 1.0])
    assert G.shape == (4, 4)
    assert np.array_equal(G, np.where(G > 0, 1.0, 0.0))
    G = pointwise_bound(P_REF, 0.0, [0, 0, 100.0])
    assert np.all(np.isfinite(G))
    assert G[3, 3] == pytest.approx(1.0 + 1e-12, rel=1e-14)  # inv_k2 branch plus |k|^-6
    assert pointwise_bound(P_REF, 0.0, [0, 0, 1.0], "em").shape == (3, 3)
    with pytest.raises(DomainError):
        pointwise_bound(P_REF, -1.0, [0, 0, 1.0])
    with pytest.raises(DomainError):
        pointwise_bound(P_REF, 1.0, [0, 0, 0])


def test_bounds_decay_in_time():
    for k in ([0, 0, 0.05], [0, 0, 1.0], [0, 0, 50.0]):
        a = pointwise_bound(P_REF, 1.0, k)
        b = pointwise_bound(P_REF, 10.0, k)
        assert np.all(b <= a)


def test_default_constants_positive():
    c = BoundConstants.default(P_REF)
    for tag in ("D0", "D1", "Dinf"):
        assert c.rates[tag]["exp_k2"] > 0
    assert c.rates["D1"]["exp_const"] > 0
    assert c.rates["Dinf"]["exp_const"] > 0


def test_source_modes_are_constrained(rng):
    k = np.array([0.3, -0.2, 0.9])
    for s in "nuEB":
        n, u, E, B = source_mode(P_REF, s, k, rng)
        assert check_constraints(FourierMode(k, n, u, E, B), P_REF, 1e-13)[2]
    with pytest.raises(DomainError):
        source_mode(P_REF, "rho", k, rng)


def test_small_scan():
    ks = direction_samples(8, 1, 1e-2, 1e2, seed=1)
    t1 = np.concatenate([[0.0], np.geomspace(0.01, 200, 40)])
    t2 = np.concatenate([[0.0], np.geomspace(0.01, 400, 44)])
    a = bound_ratio_scan(P_REF, t1, ks, n_modes=1)
    b = bound_ratio_scan(P_REF, t2, ks, n_modes=1)
    assert a.n_samples == 8 * 4 * 41
    assert all(np.all(np.isfinite(c)) for c in a.c_fit.values())
    assert a.zero_channel_max <= 1e-10
    assert c_fit_drift(a, a) == 0.0
    assert c_fit_drift(a, b) <= 0.1
    assert a.growth_flags == []


def test_slow_branch():
    ratio, expected, err = slow_branch_scaling(P_REF)
    assert expected == 16.0
    assert err <= 0.25
