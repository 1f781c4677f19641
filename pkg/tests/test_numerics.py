import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prolate.errors import ParameterError
from prolate.numerics import (QuadratureRule, SymmetricTridiagonal, bessel_j, disk_polar_rule,
                              gauss_legendre, gauss_legendre_01, sym_eig, zernike_radial,
                              zernike_radial_table)

J0_FIRST_ZERO = 2.404825557695773


def bessel_series(m: int, x: float, terms: int = 40) -> float:
    """Independent power-series oracle, adequate for x up to ~15."""
    total = 0.0
    for k in range(terms):
        c = (-1) ** k / (math.factorial(k) * math.factorial(m + k))
        total += c * (x / 2.0) ** (m + 2 * k)
    return total


def bessel_integral(m: int, x: float) -> float:
    """Integral-representation oracle: (1/pi) int_0^pi cos(m t - x sin t) dt."""
    rule = gauss_legendre(800)
    t = 0.5 * math.pi * (rule.nodes + 1.0)
    w = 0.5 * math.pi * rule.weights
    return float(np.sum(w * np.cos(m * t - x * np.sin(t))) / math.pi)


class TestBessel:
    def test_j0_at_zero(self):
        assert bessel_j(0, 0.0) == 1.0

    def test_jm_at_zero(self):
        assert bessel_j(3, 0.0) == 0.0

    def test_first_zero_of_j0(self):
        # oracle locates the same zero
        assert abs(bessel_series(0, J0_FIRST_ZERO)) < 1e-10
        assert abs(bessel_j(0, J0_FIRST_ZERO)) < 1e-10

    @pytest.mark.parametrize("m", [0, 1, 2, 5, 9])
    @pytest.mark.parametrize("x", [0.1, 1.0, 4.5, 9.0])
    def test_matches_series_oracle(self, m, x):
        # series cancellation grows with x; 5e-13 keeps the check meaningful
        assert abs(bessel_j(m, x) - bessel_series(m, x)) < 5e-13

    @pytest.mark.parametrize("m", [0, 2, 10, 50, 100])
    @pytest.mark.parametrize("x", [0.5, 10.0, 100.0, 200.0])
    def test_matches_integral_oracle(self, m, x):
        assert abs(bessel_j(m, x) - bessel_integral(m, x)) < 1e-12

    @given(st.integers(min_value=1, max_value=20),
           st.floats(min_value=0.5, max_value=50.0))
    @settings(max_examples=80, deadline=None)
    def test_three_term_recurrence(self, m, x):
        lhs = bessel_j(m - 1, x) + bessel_j(m + 1, x)
        assert abs(lhs - (2.0 * m / x) * bessel_j(m, x)) < 1e-10

    def test_domain_errors(self):
        with pytest.raises(ParameterError):
            bessel_j(-1, 1.0)
        with pytest.raises(ParameterError):
            bessel_j(0, -0.5)

    def test_vectorized(self):
        x = np.linspace(0.0, 20.0, 7)
        assert np.allclose(bessel_j(2, x), [bessel_j(2, xi) for xi in x])


class TestGaussLegendre:
    def test_one_point(self):
        r = gauss_legendre(1)
        assert r.nodes[0] == pytest.approx(0.0, abs=1e-15)
        assert r.weights[0] == pytest.approx(2.0, abs=1e-15)

    def test_two_point(self):
        r = gauss_legendre(2)
        assert np.allclose(sorted(r.nodes), [-1.0 / math.sqrt(3), 1.0 / math.sqrt(3)])
        assert np.allclose(r.weights, [1.0, 1.0])

    def test_three_point_quartic(self):
        r = gauss_legendre(3)
        assert np.sum(r.weights * r.nodes**4) == pytest.approx(0.4, abs=1e-14)

    @given(st.integers(min_value=1, max_value=60), st.data())
    @settings(max_examples=60, deadline=None)
    def test_polynomial_exactness(self, n, data):
        d = data.draw(st.integers(min_value=0, max_value=2 * n - 1))
        r = gauss_legendre(n)
        approx = float(np.sum(r.weights * r.nodes**d))
        exact = 0.0 if d % 2 else 2.0 / (d + 1)
        scale = max(1.0, float(np.sum(r.weights * np.abs(r.nodes) ** d)))
        assert abs(approx - exact) <= 1e-13 * scale

    def test_total_weight(self):
        assert gauss_legendre(37).total_weight == pytest.approx(2.0, rel=1e-14)
        assert gauss_legendre_01(19).total_weight == pytest.approx(1.0, rel=1e-14)

    def test_requires_positive_size(self):
        with pytest.raises(ParameterError):
            gauss_legendre(0)


class TestZernikeRadial:
    @pytest.mark.parametrize("m", [0, 1, 3, 7])
    def test_orthonormal_weight_r(self, m):
        rule = gauss_legendre_01(200)
        Z = zernike_radial_table(m, 8, rule.nodes)
        gram = (Z * (rule.weights * rule.nodes)) @ Z.T
        assert np.abs(gram - np.eye(8)).max() < 1e-12

    def test_degree_zero_constant(self):
        r = np.linspace(0.0, 1.0, 11)
        vals = zernike_radial(0, 0, r)
        assert np.ptp(vals) == 0.0

    def test_domain(self):
        with pytest.raises(ParameterError):
            zernike_radial(-1, 0, 0.5)


class TestSymEig:
    def test_identity(self):
        vals, vecs = sym_eig(np.eye(5))
        assert np.allclose(vals, 1.0)
        assert np.allclose(vecs @ vecs.T, np.eye(5), atol=1e-12)

    def test_diagonal(self):
        vals, _ = sym_eig(np.diag([1.0, 2.0, 3.0]))
        assert np.allclose(vals, [1.0, 2.0, 3.0])

    def test_swap_matrix(self):
        vals, _ = sym_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert np.allclose(vals, [-1.0, 1.0])

    def test_tridiagonal_form(self):
        tri = SymmetricTridiagonal(np.array([2.0, 2.0, 2.0]), np.array([-1.0, -1.0]))
        vals, vecs = sym_eig(tri)
        dense_vals, _ = sym_eig(tri.to_dense())
        assert np.allclose(vals, dense_vals, atol=1e-12)
        assert np.allclose(vecs.T @ vecs, np.eye(3), atol=1e-12)

    @pytest.mark.parametrize("dim", [2, 5, 37, 120, 200])
    def test_reconstruction_random(self, dim):
        rng = np.random.default_rng(dim)
        a = rng.standard_normal((dim, dim))
        a = (a + a.T) / 2.0
        vals, vecs = sym_eig(a)
        assert np.all(np.diff(vals) >= -1e-12)
        nrm = np.linalg.norm(a)
        assert np.linalg.norm(vecs @ np.diag(vals) @ vecs.T - a) <= 1e-9 * nrm
        assert np.abs(vecs.T @ vecs - np.eye(dim)).max() <= 1e-10
        residual = np.linalg.norm(a @ vecs - vecs * vals, axis=0)
        assert residual.max() <= 1e-10 * np.linalg.norm(a, 2)

    def test_rejects_nonsymmetric(self):
        with pytest.raises(ParameterError):
            sym_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestQuadratureRule:
    def test_rejects_nonpositive_weights(self):
        with pytest.raises(ParameterError):
            QuadratureRule(np.array([0.0, 1.0]), np.array([1.0, 0.0]))

    def test_disk_rule_measure(self):
        rule = disk_polar_rule(1.7, 24, 32)
        assert rule.total_weight == pytest.approx(math.pi * 1.7**2, rel=1e-10)

    def test_disk_rule_symmetric_nodes(self):
        rule = disk_polar_rule(1.0, 6, 8)
        flipped = {tuple(-p) for p in rule.nodes}
        assert flipped == {tuple(p) for p in rule.nodes}

    def test_immutable(self):
        rule = gauss_legendre(4)
        with pytest.raises(ValueError):
            rule.weights[0] = 5.0
