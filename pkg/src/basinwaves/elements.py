"""Lagrange reference elements on the unit triangle and quadrature rules.

The reference triangle is {(x, y) : x >= 0, y >= 0, x + y <= 1}.
Nodes are the equispaced lattice points (i/d, j/d), i + j <= d.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_DEGREE = 4
MAX_QUAD_DEGREE = 12


class ElementConfigError(ValueError):
    """Unsupported element or quadrature degree."""


def _monomial_exponents(degree):
    return [(a, b) for total in range(degree + 1) for a in range(total, -1, -1)
            for b in [total - a]]


def _lattice_nodes(degree):
    nodes = [(i / degree, j / degree)
             for total in range(degree + 1)
             for i in range(total, -1, -1)
             for j in [total - i]] if degree > 0 else [(1 / 3, 1 / 3)]
    # reorder so vertex nodes come first, matching the usual convention
    verts = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
    rest = [n for n in nodes if n not in verts]
    return np.array(verts + rest)


@dataclass(frozen=True)
class ReferenceElement:
    """Nodal Lagrange basis of a given degree on the reference triangle."""

    degree: int
    nodes: np.ndarray        # (nloc, 2)
    _coeffs: np.ndarray      # (nloc, nloc) monomial coefficients, basis i in row i
    _exps: tuple             # monomial exponents

    @property
    def num_nodes(self) -> int:
        return self.nodes.shape[0]

    def tabulate(self, points):
        """Values and gradients of all basis functions at reference points.

        Returns (vals, grads) with shapes (nloc, npts) and (nloc, npts, 2).
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        x, y = pts[:, 0], pts[:, 1]
        nmon = len(self._exps)
        V = np.empty((nmon, pts.shape[0]))
        Gx = np.empty_like(V)
        Gy = np.empty_like(V)
        for m, (a, b) in enumerate(self._exps):
            V[m] = x ** a * y ** b
            Gx[m] = a * x ** (a - 1) * y ** b if a > 0 else 0.0
            Gy[m] = b * x ** a * y ** (b - 1) if b > 0 else 0.0
        vals = self._coeffs @ V
        grads = np.stack([self._coeffs @ Gx, self._coeffs @ Gy], axis=-1)
        return vals, grads


@lru_cache(maxsize=None)
def lagrange_element(degree: int) -> ReferenceElement:
    if not (1 <= degree <= MAX_DEGREE):
        raise ElementConfigError(f"unsupported Lagrange degree {degree}")
    nodes = _lattice_nodes(degree)
    exps = tuple(_monomial_exponents(degree))
    V = np.empty((len(nodes), len(exps)))
    for m, (a, b) in enumerate(exps):
        V[:, m] = nodes[:, 0] ** a * nodes[:, 1] ** b
    coeffs = np.linalg.inv(V)  # column i of inv(V) = coefficients of basis i
    return ReferenceElement(degree=degree, nodes=nodes,
                            _coeffs=coeffs.T, _exps=exps)


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray   # (nq, dim)
    weights: np.ndarray  # (nq,)


@lru_cache(maxsize=None)
def edge_quadrature(exactness_degree: int) -> QuadratureRule:
    """Gauss-Legendre on [0, 1], exact for polynomials of the given degree."""
    if exactness_degree < 0:
        raise ElementConfigError("negative quadrature degree")
    n = exactness_degree // 2 + 1
    x, w = np.polynomial.legendre.leggauss(n)
    return QuadratureRule(points=(0.5 * (x + 1.0))[:, None], weights=0.5 * w)


@lru_cache(maxsize=None)
def triangle_quadrature(exactness_degree: int) -> QuadratureRule:
    """Collapsed tensor-product Gauss rule on the reference triangle.

    Exact for bivariate polynomials up to the stated degree; all weights
    positive, all points interior.
    """
    if not (0 <= exactness_degree <= MAX_QUAD_DEGREE):
        raise ElementConfigError(f"unsupported quadrature degree {exactness_degree}")
    d = exactness_degree
    # x = u, y = v (1 - u), Jacobian (1 - u); monomial x^a y^b becomes
    # degree a + b + 1 in u and b in v.
    nu = (d + 1) // 2 + 1
    nv = d // 2 + 1
    xu, wu = np.polynomial.legendre.leggauss(nu)
    xv, wv = np.polynomial.legendre.leggauss(nv)
    u = 0.5 * (xu + 1.0)
    v = 0.5 * (xv + 1.0)
    wu = 0.5 * wu
    wv = 0.5 * wv
    U, V = np.meshgrid(u, v, indexing="ij")
    WU, WV = np.meshgrid(wu, wv, indexing="ij")
    pts = np.column_stack([U.ravel(), (V * (1.0 - U)).ravel()])
    w = (WU * WV * (1.0 - U)).ravel()
    return QuadratureRule(points=pts, weights=w)


def reference_monomial_integral(a: int, b: int) -> float:
    """Exact value of the integral of x^a y^b over the reference triangle."""
    from math import factorial
    return factorial(a) * factorial(b) / factorial(a + b + 2)
