import itertools
import math

import numpy as np
import pytest

from nsmgreen.analysis.quadrature import composite_gauss_legendre, lebedev


def sphere_moment(a, b, c):
    """Integral of x^a y^b z^c over the unit sphere."""
    if a % 2 or b % 2 or c % 2:
        return 0.0
    g = math.gamma
    return 2 * g((a + 1) / 2) * g((b + 1) / 2) * g((c + 1) / 2) / g((a + b + c + 3) / 2)


@pytest.mark.parametrize("degree,count", [(7, 26), (11, 50)])
def test_lebedev_exactness(degree, count):
    x, w = lebedev(degree)
    assert len(x) == count
    assert np.allclose(np.linalg.norm(x, axis=1), 1.0)
    assert w.sum() == pytest.approx(4 * math.pi, rel=1e-14)
    for a, b, c in itertools.product(range(degree + 1), repeat=3):
        if a + b + c <= degree:
            got = float(np.sum(w * x[:, 0] ** a * x[:, 1] ** b * x[:, 2] ** c))
            assert got == pytest.approx(sphere_moment(a, b, c), abs=1e-13)


def test_lebedev_rejects_other_degrees():
    with pytest.raises(ValueError):
        lebedev(9)


def test_composite_gauss_legendre():
    x, w = composite_gauss_legendre([0.0, 0.5, 2.0, 3.0], 8)
    assert len(x) == 24
    assert float(w @ x**15) == pytest.approx(3.0**16 / 16, rel=1e-13)
    assert float(w @ np.exp(-x)) == pytest.approx(1 - math.exp(-3), rel=1e-14)
