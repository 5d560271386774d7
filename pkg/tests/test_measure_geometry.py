import math

import numpy as np
import pytest
from scipy.special import betainc as scipy_betainc

from jacobi_lusin import (Ball, GridFunction, JacobiParams, ball_volume,
                          ball_volume_surrogate, density, measure_interval,
                          measure_total, omega)
from jacobi_lusin.measure_geometry import (measure_interval_quad,
                                           omega_integral_quad,
                                           regularized_incomplete_beta)

PARAM_GRID = [(-0.9, -0.9), (-0.9, 0.5), (0.5, -0.9), (0.5, 0.5), (-0.5, -0.5)]


class TestDensity:
    def test_constant_for_chebyshev(self):
        p = JacobiParams(-0.5, -0.5)
        theta = np.linspace(0.1, math.pi - 0.1, 11)
        assert np.allclose(density(theta, p), 1.0)

    def test_midpoint_value(self):
        p = JacobiParams(0.0, 0.0)
        assert density(math.pi / 2, p) == pytest.approx(0.5, rel=1e-14)

    def test_reflection(self):
        p = JacobiParams(0.4, -0.7)
        q = JacobiParams(-0.7, 0.4)
        for theta in (0.3, 1.2, 2.9):
            assert density(theta, p) == pytest.approx(
                density(math.pi - theta, q), rel=1e-12)

    def test_endpoint_domain_error(self):
        p = JacobiParams(0.0, 0.0)
        with pytest.raises(ValueError):
            density(0.0, p)
        with pytest.raises(ValueError):
            density(math.pi, p)


class TestMeasureInterval:
    def test_total_mass_is_beta(self):
        p = JacobiParams(0.3, -0.6)
        expected = (math.gamma(1.3) * math.gamma(0.4) / math.gamma(1.7))
        assert measure_interval(0, math.pi, p) == pytest.approx(expected, rel=1e-12)
        assert measure_total(p) == pytest.approx(expected, rel=1e-12)

    def test_chebyshev_total_is_pi(self):
        p = JacobiParams(-0.5, -0.5)
        assert measure_interval(0, math.pi, p) == pytest.approx(math.pi, rel=1e-13)

    def test_empty_interval(self):
        p = JacobiParams(0.1, 0.1)
        assert measure_interval(1.3, 1.3, p) == 0.0

    def test_ordering_error(self):
        p = JacobiParams(0.1, 0.1)
        with pytest.raises(ValueError):
            measure_interval(2.0, 1.0, p)

    @pytest.mark.parametrize("ab", PARAM_GRID)
    def test_additivity(self, ab):
        p = JacobiParams(*ab)
        for c in (0.3, 1.5, 2.9):
            total = measure_interval(0, c, p) + measure_interval(c, math.pi, p)
            assert total == pytest.approx(measure_total(p), abs=1e-12)

    @pytest.mark.parametrize("ab", PARAM_GRID)
    def test_against_quadrature_oracle(self, ab):
        p = JacobiParams(*ab)
        rng = np.random.default_rng(3)
        for _ in range(6):
            lo, hi = np.sort(rng.uniform(0, math.pi, 2))
            ours = measure_interval(lo, hi, p)
            ref = measure_interval_quad(lo, hi, p, n=96)
            assert ours == pytest.approx(ref, rel=1e-9, abs=1e-12)

    def test_incomplete_beta_against_scipy(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            a, b = rng.uniform(0.05, 4.0, 2)
            x = rng.uniform(0, 1)
            assert regularized_incomplete_beta(a, b, x) == pytest.approx(
                scipy_betainc(a, b, x), rel=1e-11, abs=1e-13)


class TestBallVolume:
    def test_lebesgue_case(self):
        p = JacobiParams(-0.5, -0.5)
        assert ball_volume(0.5, 1.0, p) == pytest.approx(1.0, rel=1e-12)

    def test_whole_space_for_large_radius(self):
        p = JacobiParams(0.7, -0.2)
        assert ball_volume(math.pi, 1.0, p) == pytest.approx(
            measure_total(p), rel=1e-12)
        assert ball_volume(5.0, 2.5, p) == pytest.approx(
            measure_total(p), rel=1e-12)

    def test_monotone_in_radius(self):
        p = JacobiParams(0.2, -0.4)
        vols = [ball_volume(t, 1.1, p) for t in (0.1, 0.3, 0.9, 2.0)]
        assert all(v1 <= v2 + 1e-15 for v1, v2 in zip(vols, vols[1:]))

    def test_degenerate_radius_rejected(self):
        p = JacobiParams(0.2, -0.4)
        with pytest.raises(ValueError):
            ball_volume(0.0, 1.0, p)

    @pytest.mark.parametrize("ab", PARAM_GRID)
    def test_reflection_identity(self, ab):
        p = JacobiParams(*ab)
        q = JacobiParams(ab[1], ab[0])
        for theta, r in ((0.4, 0.2), (1.3, 0.9), (2.8, 0.35)):
            assert ball_volume(r, theta, p) == pytest.approx(
                ball_volume(r, math.pi - theta, q), abs=1e-12)

    @pytest.mark.parametrize("ab", PARAM_GRID)
    def test_doubling_stable(self, ab):
        p = JacobiParams(*ab)
        def worst(n):
            thetas = np.linspace(0.02, math.pi - 0.02, n)
            radii = np.geomspace(1e-3, 2.0, n)
            return max(ball_volume(2 * t, th, p) / ball_volume(t, th, p)
                       for th in thetas for t in radii)
        c1, c2 = worst(8), worst(16)
        assert math.isfinite(c2)
        assert abs(c2 - c1) / c1 < 0.1


class TestSurrogate:
    @pytest.mark.parametrize("ab", PARAM_GRID)
    def test_two_sided_comparability(self, ab):
        # the implied constant is parameter-dependent; the falsifiable check
        # is that the measured two-sided constant stabilizes under refinement
        p = JacobiParams(*ab)

        def spread(m):
            thetas = np.linspace(0.02, math.pi - 0.02, m)
            radii = np.geomspace(1e-3, math.pi - 1e-6, m)
            ratios = np.array([
                [ball_volume(r, th, p) / ball_volume_surrogate(r, th, p)
                 for r in radii] for th in thetas])
            assert np.all(ratios > 0) and np.all(np.isfinite(ratios))
            return ratios.max() / ratios.min()

        c_coarse, c_fine = spread(40), spread(80)
        assert abs(c_fine - c_coarse) / c_coarse < 0.1

    def test_chebyshev_midpoint_small_radius(self):
        p = JacobiParams(-0.5, -0.5)
        r = 1e-3
        assert ball_volume_surrogate(r, math.pi / 2, p) == pytest.approx(r)
        ratio = ball_volume(r, math.pi / 2, p) / ball_volume_surrogate(r, math.pi / 2, p)
        assert ratio == pytest.approx(2.0, rel=1e-9)

    def test_large_radius_is_one(self):
        p = JacobiParams(0.3, 0.3)
        assert ball_volume_surrogate(math.pi, 1.0, p) == 1.0
        assert ball_volume_surrogate(10.0, 1.0, p) == 1.0


class TestOmega:
    @pytest.mark.parametrize("ab", PARAM_GRID)
    def test_normalization(self, ab):
        p = JacobiParams(*ab)
        rng = np.random.default_rng(11)
        for _ in range(5):
            theta = rng.uniform(0.05, math.pi - 0.05)
            t = np.exp(rng.uniform(math.log(1e-2), math.log(4.0)))
            assert abs(omega_integral_quad(theta, t, p) - 1.0) < 1e-10

    def test_constant_weight_for_chebyshev(self):
        p = JacobiParams(-0.5, -0.5)
        theta, t = 1.5, 0.4
        eta = np.linspace(-0.39, 0.39, 9)
        assert np.allclose(omega(theta, eta, t, p), 1 / (2 * t), rtol=1e-12)

    def test_nonnegative_and_zero_outside(self):
        p = JacobiParams(0.4, -0.3)
        theta, t = 0.3, 1.0
        eta = np.linspace(-0.99, 0.99, 21)
        vals = omega(theta, eta, t, p)
        assert np.all(vals >= 0)
        assert np.all(vals[theta + eta <= 0] == 0.0)

    def test_compsin_bounds(self):
        # sin(x/2) ~ x and cos(x/2) ~ pi - x on (0, pi)
        x = np.linspace(1e-6, math.pi - 1e-6, 2001)
        r1 = np.sin(x / 2) / x
        r2 = np.cos(x / 2) / (math.pi - x)
        for r in (r1, r2):
            assert r.min() > 0.15 and r.max() < 0.51


class TestContainers:
    def test_ball_validation(self):
        with pytest.raises(ValueError):
            Ball(0.0, 1.0)
        with pytest.raises(ValueError):
            Ball(1.0, 0.0)
        assert Ball(0.5, 2.0).interval == (0.0, 2.5)

    def test_grid_function_validation(self):
        with pytest.raises(ValueError):
            GridFunction(np.array([0.2, 0.1]), np.array([1.0, 2.0]))
        with pytest.raises(ValueError):
            GridFunction(np.array([0.0, 0.1]), np.array([1.0, 2.0]))
        with pytest.raises(ValueError):
            GridFunction(np.array([0.1, 0.2]), np.array([1.0]))
