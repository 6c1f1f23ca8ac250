"""Radial Gauss-Legendre and Lebedev spherical quadrature."""

from __future__ import annotations

import itertools
import math

import numpy as np


def _signed(points):
    out = set()
    for p in points:
        for signs in itertools.product((-1, 1), repeat=3):
            out.add(tuple(s * c for s, c in zip(signs, p)))
    return sorted(out)


def _orbit(base):
    pts = set()
    for perm in itertools.permutations(base):
        pts.update(_signed([perm]))
    return np.array(sorted(pts))


def lebedev(degree: int = 7):
    """Nodes (N, 3) and weights (summing to 4 pi) of an octahedral rule.

    degree 7 has 26 nodes, degree 11 has 50 nodes.
    """
    s2, s3 = 1 / math.sqrt(2), 1 / math.sqrt(3)
    vertices = _orbit((1.0, 0.0, 0.0))
    edges = _orbit((s2, s2, 0.0))
    corners = _orbit((s3, s3, s3))
    if degree == 7:
        groups = [(vertices, 1 / 21), (edges, 4 / 105), (corners, 9 / 280)]
    elif degree == 11:
        l, m = 3 / math.sqrt(11), 1 / math.sqrt(11)
        groups = [
            (vertices, 4 / 315),
            (edges, 64 / 2835),
            (corners, 27 / 1280),
            (_orbit((l, m, m)), 14641 / 725760),
        ]
    else:
        raise ValueError("supported degrees are 7 and 11")
    nodes = np.concatenate([g for g, _ in groups])
    weights = np.concatenate([np.full(len(g), w) for g, w in groups])
    return nodes, 4 * math.pi * weights


def composite_gauss_legendre(breaks, order: int):
    """Nodes and weights of order-point Gauss-Legendre on each panel of breaks."""
    x, w = np.polynomial.legendre.leggauss(order)
    breaks = np.asarray(breaks, dtype=float)
    a, b = breaks[:-1, None], breaks[1:, None]
    nodes = 0.5 * (b - a) * x[None, :] + 0.5 * (a + b)
    weights = 0.5 * (b - a) * w[None, :]
    return nodes.ravel(), weights.ravel()
