import math

import numpy as np
import pytest
from scipy.special import eval_jacobi as scipy_jacobi

from jacobi_lusin import (JacobiParams, SpectralTruncation, TrigTerm,
                          basis_term, delta_star, delta_star_eval, delta_term,
                          delta_terms, eigenvalue, eval_jacobi,
                          eval_normalized, eval_terms, normalizing_constant)
from jacobi_lusin.jacobi_core import JacobiRows, eval_jacobi_many
from jacobi_lusin.measure_geometry import GridFunction
from jacobi_lusin.quadrature import mu_rule

PARAM_GRID = [(-0.9, -0.9), (-0.9, 0.5), (0.5, -0.9), (0.5, 0.5), (-0.5, -0.5)]


class TestJacobiParams:
    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            JacobiParams(-1.0, 0.0)
        with pytest.raises(ValueError):
            JacobiParams(0.0, -1.5)

    @pytest.mark.parametrize("ab,regime", [
        ((0.5, 0.5), "i"), ((-0.5, -0.5), "i"), ((-0.9, 0.5), "ii"),
        ((0.5, -0.9), "iii"), ((-0.9, -0.7), "iv")])
    def test_regime(self, ab, regime):
        assert JacobiParams(*ab).regime == regime


class TestEvalJacobi:
    def test_degree_zero_is_one(self):
        p = JacobiParams(0.3, -0.7)
        for x in (-1.0, -0.2, 0.9, 1.0):
            assert eval_jacobi(0, p, x) == 1.0

    def test_degree_one_hypergeometric(self):
        # oracle: the explicit degree-one polynomial (a+1) + (a+b+2)(x-1)/2
        p = JacobiParams(0.7, -0.3)
        for x in (-0.9, 0.1, 0.6):
            expected = (p.alpha + 1) + (p.alpha + p.beta + 2) * (x - 1) / 2
            assert eval_jacobi(1, p, x) == pytest.approx(expected, rel=1e-14)

    def test_chebyshev_proportionality(self):
        p = JacobiParams(-0.5, -0.5)
        at_one = eval_jacobi(5, p, 1.0)
        for theta in (0.3, 1.1, 2.9):
            ratio = eval_jacobi(5, p, math.cos(theta)) / at_one
            assert ratio == pytest.approx(math.cos(5 * theta), abs=1e-12)

    def test_domain_error(self):
        p = JacobiParams(0.0, 0.0)
        with pytest.raises(ValueError):
            eval_jacobi(3, p, 1.5)
        with pytest.raises(ValueError):
            eval_jacobi(-1, p, 0.5)

    @pytest.mark.parametrize("ab", PARAM_GRID)
    def test_against_scipy(self, ab):
        p = JacobiParams(*ab)
        x = np.linspace(-0.99, 0.99, 7)
        for n in (2, 7, 23, 60):
            ours = eval_jacobi(n, p, x)
            ref = scipy_jacobi(n, p.alpha, p.beta, x)
            assert np.allclose(ours, ref, rtol=1e-10, atol=1e-12)

    def test_chunked_rows_match_single_take(self):
        rows = JacobiRows(0.3, -0.4, np.array([-0.7, 0.2, 0.95]))
        parts = [rows.take(1), rows.take(2), rows.take(40), rows.take(41),
                 rows.take(80)]
        chunked = np.concatenate(parts)
        direct = eval_jacobi_many(79, 0.3, -0.4, np.array([-0.7, 0.2, 0.95]))
        assert np.allclose(chunked, direct, rtol=1e-13)


class TestNormalization:
    def test_chebyshev_c0(self):
        p = JacobiParams(-0.5, -0.5)
        assert normalizing_constant(0, p) == pytest.approx(math.pi ** -0.5, rel=1e-13)

    def test_orthogonality_distinct_degrees(self):
        p = JacobiParams(0.7, -0.3)
        theta, w = mu_rule(p.alpha, p.beta, 32)
        f2 = eval_normalized(2, p, theta)
        f3 = eval_normalized(3, p, theta)
        assert abs(np.sum(w * f2 * f3)) < 1e-10

    def test_generic_norm_against_quadrature(self):
        p = JacobiParams(0.7, -0.3)
        theta, w = mu_rule(p.alpha, p.beta, 48)
        f4 = eval_normalized(4, p, theta)
        assert abs(np.sum(w * f4 * f4) - 1.0) < 1e-8

    def test_zero_sum_parameters(self):
        # alpha + beta + 1 = 0 exercises the Beta-function special case
        p = JacobiParams(-0.3, -0.7)
        theta, w = mu_rule(p.alpha, p.beta, 48)
        for n in (0, 1, 5):
            f = eval_normalized(n, p, theta)
            assert abs(np.sum(w * f * f) - 1.0) < 1e-10

    @pytest.mark.parametrize("ab", PARAM_GRID)
    def test_orthonormality_small_grid(self, ab):
        p = JacobiParams(*ab)
        nmax = 12
        theta, w = mu_rule(p.alpha, p.beta, 40)
        mat = np.array([eval_normalized(n, p, theta) for n in range(nmax + 1)])
        gram = (mat * w) @ mat.T
        assert np.max(np.abs(gram - np.eye(nmax + 1))) < 1e-10

    def test_chebyshev_degeneration(self):
        p = JacobiParams(-0.5, -0.5)
        theta = np.linspace(0.05, math.pi - 0.05, 9)
        assert np.allclose(eval_normalized(0, p, theta), math.pi ** -0.5, atol=1e-10)
        for n in (1, 4, 9):
            ref = math.sqrt(2 / math.pi) * np.cos(n * theta)
            assert np.allclose(eval_normalized(n, p, theta), ref, atol=1e-10)


class TestEigenvalue:
    def test_ground_eigenvalue(self):
        p = JacobiParams(0.3, 0.9)
        assert eigenvalue(0, p) == pytest.approx(((0.3 + 0.9 + 1) / 2) ** 2)

    def test_chebyshev_squares(self):
        p = JacobiParams(-0.5, -0.5)
        for n in range(6):
            assert eigenvalue(n, p) == pytest.approx(n * n)

    def test_gap_formula(self):
        # lam_n - lam_0 = n (n + alpha + beta + 1), expanded and checked
        p = JacobiParams(0.2, 0.4)
        gap = eigenvalue(3, p) - eigenvalue(0, p)
        assert gap == pytest.approx(3 * (3 + 0.2 + 0.4 + 1))
        assert gap == pytest.approx(13.8)


def _richardson_derivative(f, x, h=1e-3):
    d1 = (f(x + h) - f(x - h)) / (2 * h)
    d2 = (f(x + h / 2) - f(x - h / 2)) / h
    return (4 * d2 - d1) / 3


class TestTermAlgebra:
    def test_derivative_of_constant_is_empty(self):
        p = JacobiParams(0.5, 0.5)
        assert delta_term(basis_term(0, p)) == []

    def test_term_count_bound(self):
        p = JacobiParams(0.2, -0.3)
        terms = [basis_term(6, p)]
        for k in range(1, 5):
            terms = delta_terms(terms)
            assert len(terms) <= 3 ** k
            for t in terms:
                assert t.n >= 0 and t.sin_pow >= 0 and t.cos_pow >= 0

    @pytest.mark.parametrize("n", [1, 3, 7, 10])
    def test_derivative_matches_finite_difference(self, n):
        p = JacobiParams(0.3, -0.4)
        terms = delta_terms([basis_term(n, p)])
        exact = eval_terms(terms, math.pi / 2)
        approx = _richardson_derivative(
            lambda th: eval_normalized(n, p, th), math.pi / 2)
        assert exact == pytest.approx(approx, abs=1e-7)

    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_eigen_ode(self, n):
        # second order equation satisfied by the basis functions
        p = JacobiParams(0.7, -0.2)
        lam_gap = eigenvalue(n, p) - eigenvalue(0, p)
        base = [basis_term(n, p)]
        d1 = delta_terms(base)
        d2 = delta_terms(d1)
        for theta in (0.4, 1.3, 2.7):
            drift = ((p.alpha - p.beta + (p.alpha + p.beta + 1) * math.cos(theta))
                     / math.sin(theta))
            resid = (eval_terms(d2, theta) + drift * eval_terms(d1, theta)
                     + lam_gap * eval_terms(base, theta))
            assert abs(resid) < 1e-8 * (1 + lam_gap)

    def test_invalid_term(self):
        with pytest.raises(ValueError):
            TrigTerm(1.0, -1, 0, 2, 0.0, 0.0)


class TestDeltaStar:
    def test_adjointness_by_quadrature(self):
        # oracle: each piece of the adjoint integrated against the rule whose
        # weight absorbs its endpoint behavior exactly (params above -1/2 so
        # every shifted weight stays admissible)
        p = JacobiParams(0.7, 0.4)
        a, b = p.alpha, p.beta
        f = [basis_term(1, p)]
        g = [basis_term(2, p)]
        fp = delta_terms(f)
        gp = delta_terms(g)

        th_s, w_s = mu_rule(a + 0.5, b + 0.5, 32)
        lhs = 2 * np.sum(w_s * eval_terms(fp, th_s) * eval_terms(g, th_s)
                         / np.sin(th_s))
        minus_fgp = -2 * np.sum(w_s * eval_terms(f, th_s) * eval_terms(gp, th_s)
                                / np.sin(th_s))
        th_c, w_c = mu_rule(a - 0.5, b + 0.5, 32)
        cot_piece = -(a + 0.5) * np.sum(w_c * eval_terms(f, th_c)
                                        * eval_terms(g, th_c))
        th_t, w_t = mu_rule(a + 0.5, b - 0.5, 32)
        tan_piece = (b + 0.5) * np.sum(w_t * eval_terms(f, th_t)
                                       * eval_terms(g, th_t))
        rhs = minus_fgp + cot_piece + tan_piece
        assert lhs == pytest.approx(rhs, abs=1e-8)

    @pytest.mark.parametrize("n", [1, 3, 6])
    def test_factorization_identity(self, n):
        # applying the adjoint after the derivative recovers the eigenvalue gap
        p = JacobiParams(0.3, -0.4)
        lam_gap = eigenvalue(n, p) - eigenvalue(0, p)
        d1 = delta_terms([basis_term(n, p)])
        for theta in (0.5, 1.5, 2.5):
            val = delta_star_eval(d1, p, theta)
            ref = lam_gap * eval_normalized(n, p, theta)
            assert val == pytest.approx(ref, rel=1e-9, abs=1e-9)

    def test_zero_function(self):
        p = JacobiParams(0.1, 0.1)
        nodes = np.linspace(0.2, 3.0, 30)
        out = delta_star(GridFunction(nodes, np.zeros_like(nodes)), p)
        assert np.all(out.values == 0.0)

    def test_endpoint_exclusion(self):
        p = JacobiParams(0.1, 0.1)
        nodes = np.array([1e-8, 0.5, 1.0])
        with pytest.raises(ValueError):
            delta_star(GridFunction(nodes, np.ones(3)), p)

    def test_grid_matches_exact_for_smooth_function(self):
        p = JacobiParams(0.4, -0.2)
        nodes = np.linspace(0.3, 2.8, 400)
        f = [basis_term(3, p)]
        grid = delta_star(GridFunction(nodes, eval_terms(f, nodes)), p)
        exact = delta_star_eval(f, p, nodes)
        interior = slice(5, -5)
        assert np.max(np.abs(grid.values[interior] - exact[interior])) < 5e-4


class TestEigenRelation:
    def test_operator_residual(self):
        p = JacobiParams(0.5, -0.3)
        theta = np.linspace(0.1, math.pi - 0.1, 41)
        for n in range(0, 21, 5):
            lam = eigenvalue(n, p)
            base = [basis_term(n, p)]
            d1 = delta_terms(base)
            d2 = delta_terms(d1)
            drift = ((p.alpha - p.beta + (p.alpha + p.beta + 1) * np.cos(theta))
                     / np.sin(theta))
            jf = (-eval_terms(d2, theta) - drift * eval_terms(d1, theta)
                  + eigenvalue(0, p) * eval_terms(base, theta))
            resid = np.max(np.abs(jf - lam * eval_terms(base, theta)))
            assert resid < 1e-6 * (1 + lam)


class TestSpectralTruncation:
    def test_validation(self):
        with pytest.raises(ValueError):
            SpectralTruncation(mode="bogus")
        with pytest.raises(ValueError):
            SpectralTruncation(tail_eps=0.0)

    def test_eps_resolution(self):
        tr = SpectralTruncation()
        assert tr.resolve_eps(0) == 1e-12
        assert tr.resolve_eps(4) == 1e-10
        assert SpectralTruncation(tail_eps=1e-8).resolve_eps(6) == 1e-8
