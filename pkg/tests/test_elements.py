import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from basinwaves.elements import (ElementConfigError, edge_quadrature,
                                 lagrange_element,
                                 reference_monomial_integral,
                                 triangle_quadrature)


def random_reference_points(rng, n):
    """Uniform points in the reference triangle."""
    a = rng.random((n, 2))
    flip = a.sum(axis=1) > 1
    a[flip] = 1.0 - a[flip]
    return a


class TestLagrangeElement:
    @pytest.mark.parametrize("degree", [1, 2, 3, 4])
    def test_node_count(self, degree):
        elem = lagrange_element(degree)
        assert elem.num_nodes == (degree + 1) * (degree + 2) // 2

    @pytest.mark.parametrize("degree", [1, 2, 3, 4])
    def test_nodal_delta_property(self, degree):
        elem = lagrange_element(degree)
        vals, _ = elem.tabulate(elem.nodes)
        assert np.allclose(vals, np.eye(elem.num_nodes), atol=1e-13)

    @pytest.mark.parametrize("degree", [1, 2, 3, 4])
    def test_partition_of_unity(self, degree):
        elem = lagrange_element(degree)
        rng = np.random.default_rng(7)
        pts = random_reference_points(rng, 40)
        vals, grads = elem.tabulate(pts)
        assert np.allclose(vals.sum(axis=0), 1.0, atol=1e-13)
        assert np.allclose(grads.sum(axis=0), 0.0, atol=1e-12)

    def test_degree1_centroid(self):
        elem = lagrange_element(1)
        vals, _ = elem.tabulate(np.array([[1 / 3, 1 / 3]]))
        assert np.allclose(vals[:, 0], 1 / 3, atol=1e-14)

    def test_degree2_vertex_basis_vanishes_at_opposite_edge_midpoint(self):
        elem = lagrange_element(2)
        # vertex (0,0) is local node 0; the opposite edge runs from (1,0)
        # to (0,1) with midpoint (1/2, 1/2)
        vals, _ = elem.tabulate(np.array([[0.5, 0.5]]))
        assert vals[0, 0] == pytest.approx(0.0, abs=1e-14)

    def test_degree3_partition_of_unity_50_points(self):
        elem = lagrange_element(3)
        rng = np.random.default_rng(3)
        pts = random_reference_points(rng, 50)
        vals, _ = elem.tabulate(pts)
        assert np.allclose(vals.sum(axis=0), 1.0, atol=1e-13)

    @pytest.mark.parametrize("degree", [0, 5, -1])
    def test_unsupported_degree(self, degree):
        with pytest.raises(ElementConfigError):
            lagrange_element(degree)

    @given(degree=st.integers(1, 4), seed=st.integers(0, 10_000))
    def test_reproduces_polynomials_of_its_degree(self, degree, seed):
        rng = np.random.default_rng(seed)
        exps = [(a, b) for a in range(degree + 1) for b in range(degree + 1)
                if a + b <= degree]
        coeff = rng.standard_normal(len(exps))

        def poly(x, y):
            return sum(c * x ** a * y ** b for c, (a, b) in zip(coeff, exps))

        elem = lagrange_element(degree)
        nodal = poly(elem.nodes[:, 0], elem.nodes[:, 1])
        pts = random_reference_points(rng, 20)
        vals, _ = elem.tabulate(pts)
        recon = nodal @ vals
        assert np.allclose(recon, poly(pts[:, 0], pts[:, 1]), atol=1e-11)


class TestTriangleQuadrature:
    def test_exactness1_constant(self):
        rule = triangle_quadrature(1)
        assert rule.weights.sum() == pytest.approx(0.5, rel=1e-14)

    def test_exactness2_x_squared(self):
        rule = triangle_quadrature(2)
        val = np.sum(rule.weights * rule.points[:, 0] ** 2)
        assert val == pytest.approx(1 / 12, rel=1e-14)

    @pytest.mark.parametrize("deg", range(0, 13))
    def test_monomials_exact(self, deg):
        rule = triangle_quadrature(deg)
        for a in range(deg + 1):
            for b in range(deg + 1 - a):
                val = np.sum(rule.weights
                             * rule.points[:, 0] ** a
                             * rule.points[:, 1] ** b)
                exact = reference_monomial_integral(a, b)
                assert abs(val - exact) <= 1e-14, (deg, a, b)

    def test_weights_positive_points_inside(self):
        for deg in range(13):
            rule = triangle_quadrature(deg)
            assert np.all(rule.weights > 0)
            x, y = rule.points[:, 0], rule.points[:, 1]
            assert np.all(x > 0) and np.all(y > 0) and np.all(x + y < 1)

    def test_degree_too_high(self):
        with pytest.raises(ElementConfigError):
            triangle_quadrature(13)


class TestEdgeQuadrature:
    def test_one_point_linear(self):
        rule = edge_quadrature(1)
        assert len(rule.weights) == 1
        assert np.sum(rule.weights * rule.points[:, 0]) == pytest.approx(
            0.5, rel=1e-14)

    def test_two_point_cubic(self):
        rule = edge_quadrature(3)
        assert len(rule.weights) == 2
        assert np.sum(rule.weights * rule.points[:, 0] ** 3) == pytest.approx(
            0.25, rel=1e-14)

    @pytest.mark.parametrize("n", range(1, 9))
    def test_n_points_exact_to_degree_2n_minus_1(self, n):
        rule = edge_quadrature(2 * n - 1)
        assert len(rule.weights) == n
        for k in range(2 * n):
            val = np.sum(rule.weights * rule.points[:, 0] ** k)
            assert val == pytest.approx(1.0 / (k + 1), rel=1e-13), k

    def test_negative_degree(self):
        with pytest.raises(ElementConfigError):
            edge_quadrature(-1)


def test_reference_monomial_integral_values():
    assert reference_monomial_integral(0, 0) == pytest.approx(0.5)
    assert reference_monomial_integral(1, 0) == pytest.approx(1 / 6)
    assert reference_monomial_integral(2, 0) == pytest.approx(1 / 12)
    assert reference_monomial_integral(1, 1) == pytest.approx(1 / 24)
