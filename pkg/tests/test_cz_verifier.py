import math

import numpy as np
import pytest

from jacobi_lusin import (ConeGrid, DerivativeSpec, GammaChoice, JacobiParams,
                          check_growth, check_lemma, check_smoothness_phi,
                          check_smoothness_theta, l2_operator_check)
from jacobi_lusin.area_integrals import AreaNormEngine
from jacobi_lusin.cz_verifier import (_ladder, _rng_for, sample_pairs,
                                      sample_triples)

QUICK_CONE = ConeGrid(t_min=2e-3, T_max=math.pi, n_levels=14, eta_per_level=8)


class TestGammaChoice:
    def test_theorem_range(self):
        p = JacobiParams(-0.9, -0.9)
        GammaChoice(0.05).validate_for(p)
        with pytest.raises(ValueError):
            GammaChoice(0.3).validate_for(p)      # above min(a,b)+1 = 0.1
        with pytest.raises(ValueError):
            GammaChoice(0.7).validate_for(JacobiParams(0.5, 0.5))
        with pytest.raises(ValueError):
            GammaChoice(0.0).validate_for(JacobiParams(0.5, 0.5))

    def test_exploratory_bypass(self):
        GammaChoice(0.3, exploratory=True).validate_for(JacobiParams(-0.9, -0.9))


class TestSamplers:
    def test_ladder_prefix_covers_extremes(self):
        vals = _ladder(0.1, 1.0, 8)
        assert vals[0] == pytest.approx(0.1)
        assert vals[1] == pytest.approx(1.0)

    def test_pairs_interior_and_stratified(self):
        rng = _rng_for(3, "pairs")
        pairs = sample_pairs(rng, 6)
        assert pairs.shape == (24, 2)
        assert np.all(pairs > 0) and np.all(pairs < math.pi)

    def test_triples_hypothesis(self):
        rng = _rng_for(3, "triples")
        triples = sample_triples(rng, 8)
        th, thp, ph = triples.T
        assert np.all(np.abs(th - ph) > 2 * np.abs(th - thp))
        assert np.all((thp > 0) & (thp < math.pi))

    def test_determinism(self):
        a = sample_pairs(_rng_for(9, "x"), 5)
        b = sample_pairs(_rng_for(9, "x"), 5)
        assert np.array_equal(a, b)


class TestLemmaSuites:
    @pytest.fixture
    def p(self):
        return JacobiParams(0.5, 0.5)

    def test_omega_identity(self, p):
        r = check_lemma("omega", p, seed=1, n_samples=40)
        assert r.verdict in ("stable", "unstable")
        assert r.measuredC < 1e-9
        assert r.suite == "lemma:omega"

    def test_omega_identity_all_regimes(self):
        for ab in [(-0.9, 0.5), (0.5, -0.9), (-0.9, -0.7)]:
            r = check_lemma("omega", JacobiParams(*ab), seed=2, n_samples=25)
            assert r.measuredC < 1e-9

    def test_qeta_ratio(self, p):
        r = check_lemma("qeta", p, seed=5, n_samples=800)
        assert r.details["ratio_inf"] > 0
        assert math.isfinite(r.details["ratio_sup"])
        assert r.verdict == "stable"

    def test_upstilde_ratio(self, p):
        r = check_lemma("upstilde", p, seed=5, n_samples=60, npts=24)
        assert r.details["ratio_inf"] > 0
        assert math.isfinite(r.details["ratio_sup"])
        assert r.refinementDelta < 0.1

    def test_ht1_bound(self, p):
        r = check_lemma("Ht1", p, d=DerivativeSpec(M=1, N=0), seed=4,
                        n_samples=40, npts=24)
        assert math.isfinite(r.measuredC) and r.measuredC > 0
        assert r.flavor == "both"

    def test_ht1eta_bound(self, p):
        r = check_lemma("Ht1eta", p, d=DerivativeSpec(M=0, N=1), seed=4,
                        n_samples=40, npts=24)
        assert math.isfinite(r.measuredC) and r.measuredC > 0

    def test_finbridge_bound(self, p):
        r = check_lemma("finbridge", p, seed=4, n_samples=24, npts=20,
                        n_panels=40)
        assert math.isfinite(r.measuredC) and r.measuredC > 0

    def test_longtime_norm_finite(self, p):
        r = check_lemma("longtime", p, d=DerivativeSpec(M=1, N=1), seed=4,
                        grid_n=8, n_panels=24)
        assert math.isfinite(r.measuredC) and r.measuredC > 0
        assert r.verdict == "stable"

    def test_omegadiff(self, p):
        r = check_lemma("omegadiff", p, gamma=0.45, seed=6, n_samples=60)
        assert math.isfinite(r.measuredC)
        assert r.gamma == 0.45

    def test_omegadiff_rejects_out_of_range_gamma(self):
        with pytest.raises(ValueError):
            check_lemma("omegadiff", JacobiParams(-0.9, -0.9), gamma=0.3,
                        seed=6, n_samples=10)

    def test_omegaprime_nonstrict_range(self):
        # this lemma admits gamma equal to min(alpha, beta) + 1
        p = JacobiParams(-0.9, -0.6)
        r = check_lemma("omegaprime", p, gamma=0.1, seed=6, n_samples=60)
        assert math.isfinite(r.measuredC)
        with pytest.raises(ValueError):
            check_lemma("omegaprime", p, gamma=0.11, seed=6, n_samples=10)

    def test_unknown_lemma(self, p):
        with pytest.raises(ValueError):
            check_lemma("bogus", p)

    def test_seeded_reports_reproduce(self, p):
        a = check_lemma("qeta", p, seed=11, n_samples=200)
        b = check_lemma("qeta", p, seed=11, n_samples=200)
        assert a == b


class TestEstXYXi:
    # |x - y|^xi <= C |x^xi - y^xi| on [0, 4], xi >= 1, with a grid-stable C
    @pytest.mark.parametrize("xi", [1.0, 2.0, 1.0 / (2 * 0.45)])
    def test_constant_stable(self, xi):
        def worst(n):
            x = np.linspace(0, 4, n)
            X, Y = np.meshgrid(x, x)
            mask = X != Y
            num = np.abs(X - Y) ** xi
            den = np.abs(X ** xi - Y ** xi)
            return float(np.max(num[mask] / den[mask]))

        c1, c2 = worst(200), worst(400)
        assert math.isfinite(c2)
        assert abs(c2 - c1) / c1 < 0.1


class TestStandardEstimates:
    def test_growth_runs_and_reports(self):
        p = JacobiParams(0.5, 0.5)
        r = check_growth(DerivativeSpec(M=1, N=0), p, seed=3, n_per_stratum=2,
                         cone=QUICK_CONE, include_extreme_diag=False)
        assert r.suite == "gr" and r.flavor == "both"
        assert math.isfinite(r.measuredC) and r.measuredC > 0

    def test_smoothness_theta_gamma_validation(self):
        p = JacobiParams(-0.9, -0.9)
        with pytest.raises(ValueError):
            check_smoothness_theta(DerivativeSpec(M=1), p, GammaChoice(0.5),
                                   seed=3, cone=QUICK_CONE)

    def test_smoothness_theta_exploratory_tag(self):
        p = JacobiParams(-0.9, -0.9)
        r = check_smoothness_theta(DerivativeSpec(M=1), p,
                                   GammaChoice(0.3, exploratory=True),
                                   seed=3, n_per_stratum=2, cone=QUICK_CONE)
        assert r.suite == "sm1:exploratory"

    def test_smoothness_phi_gamma_is_one(self):
        p = JacobiParams(0.5, 0.5)
        r = check_smoothness_phi(DerivativeSpec(M=1), p, seed=3,
                                 n_per_stratum=2, cone=QUICK_CONE)
        assert r.gamma == 1.0
        assert math.isfinite(r.measuredC)


class TestL2OperatorCheck:
    def test_basic_run(self):
        p = JacobiParams(-0.5, -0.5)
        r = l2_operator_check(DerivativeSpec(M=1), p, nmodes=6, trials=10,
                              seed=2, cone=QUICK_CONE, n_theta=16)
        assert r.suite == "l2"
        assert math.isfinite(r.measuredC)
        assert r.details["max_over_median"] < 3.0
        assert len(r.details["ratios"]) == 10

    def test_constant_mode_killed(self):
        p = JacobiParams(0.4, 0.2)
        engine = AreaNormEngine(DerivativeSpec(N=1), p, QUICK_CONE, 4, n_theta=12)
        c = np.array([1.0, 0.0, 0.0, 0.0])
        assert engine.norm(c) == pytest.approx(0.0, abs=1e-13)

    def test_validation(self):
        p = JacobiParams(0.4, 0.2)
        with pytest.raises(ValueError):
            l2_operator_check(DerivativeSpec(M=1), p, nmodes=40, trials=10)
        with pytest.raises(ValueError):
            l2_operator_check(DerivativeSpec(M=1), p, nmodes=4, trials=3)
