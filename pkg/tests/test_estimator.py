import numpy as np
import pytest

from oracles import expected_raw_estimate_d2, random_simplex
from zosimplex.dirichlet import DirichletSampler
from zosimplex.errors import DeltaOutOfRange, ObjectiveEvaluationFailure, ZOSimplexError
from zosimplex.estimator import (
    EstimatorConfig,
    bias_check,
    estimate_raw,
    estimate_scaled,
    raw_estimates,
)
from zosimplex.objectives import Objective, from_id, make_linear, make_psd_quadratic, make_quadratic_distance
from zosimplex.simplex import center, validate_simplex


def quaddist_exact_mean(c, x, alpha, delta):
    """Exact E[raw estimate] for f = ||x - c||^2 / 2: P (x - c - delta x) / (d (alpha d + 1))."""
    d = len(x)
    return center(np.asarray(x) - np.asarray(c) - delta * np.asarray(x)) / (d * (alpha * d + 1))


class TestConfig:
    def test_scale(self):
        assert EstimatorConfig(1.0, 0.1, 2).scale == 6.0
        assert EstimatorConfig(0.5, 0.1, 10).scale == 60.0

    @pytest.mark.parametrize("delta", [0.0, 1.0, 1.2])
    def test_delta_range(self, delta):
        with pytest.raises(DeltaOutOfRange):
            EstimatorConfig(1.0, delta, 3)

    def test_alpha_positive(self):
        with pytest.raises(ZOSimplexError):
            EstimatorConfig(0.0, 0.1, 3)


class TestSingleDraw:
    def test_constant_objective(self):
        f = make_linear([2.0, 2.0, 2.0])
        cfg = EstimatorConfig(1.0, 0.25, 3)
        u = DirichletSampler(1.0, 3, 0).sample()
        s = estimate_raw(f, np.full(3, 1 / 3), cfg, u)
        np.testing.assert_allclose(s.g, 2.0 / 0.25 * center(u.coords), atol=1e-15)

    def test_one_query_and_logged_point(self):
        f = make_quadratic_distance([0.6, 0.3, 0.1])
        cfg = EstimatorConfig(1.0, 0.2, 3)
        x = np.array([0.2, 0.2, 0.6])
        u = DirichletSampler(1.0, 3, 1).sample()
        s = estimate_raw(f, x, cfg, u)
        assert f.query_count == 1 and f.grad_count == 0
        validate_simplex(s.query_point.coords)
        np.testing.assert_allclose(s.query_point.coords, 0.8 * x + 0.2 * u.coords, atol=1e-16)
        assert s.f_value == pytest.approx(f(s.query_point.coords))

    def test_scaled_is_factor_times_raw(self):
        f = make_quadratic_distance([0.3, 0.7])
        cfg = EstimatorConfig(1.0, 0.1, 2)
        u = DirichletSampler(1.0, 2, 2).sample()
        x = np.array([0.5, 0.5])
        np.testing.assert_allclose(estimate_scaled(f, x, cfg, u).g, 6.0 * estimate_raw(f, x, cfg, u).g, rtol=1e-15)

    def test_scale_equivariance(self):
        A, b = np.diag([1.0, 2.0, 3.0]), np.array([0.1, -0.2, 0.3])
        f, f2 = make_psd_quadratic(A, b), make_psd_quadratic(2 * A, 2 * b)
        cfg = EstimatorConfig(0.5, 0.3, 3)
        x = np.array([0.1, 0.6, 0.3])
        for u in DirichletSampler(0.5, 3, 3).sample_n(50):
            np.testing.assert_array_equal(estimate_scaled(f2, x, cfg, u).g, 2 * estimate_scaled(f, x, cfg, u).g)

    def test_zero_sum_and_magnitude(self):
        rng = np.random.default_rng(4)
        for d in (2, 3, 10):
            for f in (from_id("linear:1", d), from_id("quaddist:2", d), from_id("psdquad:3", d)):
                for alpha, delta in [(0.5, 0.02), (1.0, 0.2), (5.0, 0.5)]:
                    cfg = EstimatorConfig(alpha, delta, d)
                    U = DirichletSampler(alpha, d, 5).sample_n(200)
                    for x, u in zip(random_simplex(rng, 200, d), U):
                        g = estimate_scaled(f, x, cfg, u).g
                        assert abs(g.sum()) <= 1e-10
                        assert np.linalg.norm(g) <= cfg.scale * f.bound_B / delta

    def test_non_finite_objective(self):
        bad = Objective("nan", 2, lambda x: np.full(x.shape[:-1], np.nan), lambda x: x, 0.0, 1.0)
        cfg = EstimatorConfig(1.0, 0.1, 2)
        with pytest.raises(ObjectiveEvaluationFailure):
            estimate_raw(bad, np.array([0.5, 0.5]), cfg, np.array([0.3, 0.7]))
        with pytest.raises(ObjectiveEvaluationFailure):
            raw_estimates(bad, np.array([0.5, 0.5]), 0.1, np.array([[0.3, 0.7]]))

    def test_batch_matches_single(self):
        f = from_id("psdquad:6", 4)
        cfg = EstimatorConfig(0.5, 0.1, 4)
        x = np.array([0.1, 0.2, 0.3, 0.4])
        U = DirichletSampler(0.5, 4, 6).sample_n(20)
        G = raw_estimates(f, x, 0.1, U)
        for g, u in zip(G, U):
            np.testing.assert_allclose(g, estimate_raw(f, x, cfg, u).g, rtol=1e-13, atol=1e-15)


class TestQuadratureOracle:
    """The closed-form quadratic mean against direct integration over Beta(alpha, alpha)."""

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 5.0])
    @pytest.mark.parametrize("delta", [0.02, 0.2, 0.7])
    def test_closed_form(self, alpha, delta):
        c, x = np.array([0.8, 0.2]), np.array([0.35, 0.65])
        f = make_quadratic_distance(c)
        quad = expected_raw_estimate_d2(f, x, alpha, delta)
        np.testing.assert_allclose(quad, quaddist_exact_mean(c, x, alpha, delta), atol=1e-9)

    def test_linear_has_no_bias(self):
        c, x = np.array([1.0, -2.0]), np.array([0.3, 0.7])
        f = make_linear(c)
        quad = expected_raw_estimate_d2(f, x, 0.7, 0.4)
        np.testing.assert_allclose(quad, center(c) / (2 * (0.7 * 2 + 1)), atol=1e-10)


class TestMonteCarlo:
    def test_constant_objective_mean_zero(self):
        f = make_linear([1.5, 1.5, 1.5])
        U = DirichletSampler(1.0, 3, 7).sample_n(10**5)
        G = raw_estimates(f, np.full(3, 1 / 3), 0.1, U)
        se = G.std(axis=0) / np.sqrt(len(G))
        assert np.all(np.abs(G.mean(axis=0)) <= 3 * se)

    def test_linear_mean(self):
        c = np.array([0.4, -1.0, 0.7])
        f = make_linear(c)
        cfg = EstimatorConfig(1.0, 0.1, 3)
        rep = bias_check(f, [0.2, 0.5, 0.3], cfg, 10**6, DirichletSampler(1.0, 3, 8))
        np.testing.assert_allclose(rep.target, center(c) / 12)
        assert rep.bias_norm <= 3 * rep.std_err
        assert rep.passed

    def test_quadratic_within_bound(self):
        c = np.array([0.6, 0.3, 0.1])
        x = np.array([0.2, 0.5, 0.3])
        f = make_quadratic_distance(c)
        cfg = EstimatorConfig(1.0, 0.05, 3)
        rep = bias_check(f, x, cfg, 10**6, DirichletSampler(1.0, 3, 9))
        assert rep.bound == pytest.approx(0.1)
        assert rep.bias_norm <= 0.1 + 3 * rep.std_err
        # sharper: the Monte-Carlo mean sits on the exact expectation
        assert np.linalg.norm(rep.mc_mean - quaddist_exact_mean(c, x, 1.0, 0.05)) <= 3 * rep.std_err

    def test_scaled_directional_linear(self):
        c = np.array([0.4, -1.0, 0.7])
        f = make_linear(c)
        x, xp = np.array([0.2, 0.5, 0.3]), np.array([0.7, 0.1, 0.2])
        rep = bias_check(f, x, EstimatorConfig(1.0, 0.1, 3), 10**6, DirichletSampler(1.0, 3, 10), x_prime=xp)
        assert rep.cor_bound == 0.0
        assert rep.cor_err <= 3 * rep.cor_std_err

    def test_scaled_directional_quadratic(self):
        rng = np.random.default_rng(11)
        x, xp = random_simplex(rng, 2, 3)
        f = make_quadratic_distance([0.6, 0.3, 0.1])
        rep = bias_check(f, x, EstimatorConfig(1.0, 0.01, 3), 10**6, DirichletSampler(1.0, 3, 12), x_prime=xp)
        assert rep.cor_bound == pytest.approx(0.48)
        assert rep.cor_err <= 0.48 + 3 * rep.cor_std_err
        assert rep.cor_passed

    def test_bound_is_linear_in_delta(self):
        f = make_quadratic_distance([0.6, 0.3, 0.1])
        x = np.full(3, 1 / 3)
        b1 = bias_check(f, x, EstimatorConfig(1.0, 0.2, 3), 1000, DirichletSampler(1.0, 3, 0)).bound
        b2 = bias_check(f, x, EstimatorConfig(1.0, 0.1, 3), 1000, DirichletSampler(1.0, 3, 0)).bound
        assert b1 == pytest.approx(2 * b2)

    def test_bias_shrinks_with_delta(self):
        c, x = np.array([0.8, 0.2]), np.array([0.35, 0.65])
        f = make_quadratic_distance(c)
        exact = {dl: np.linalg.norm(expected_raw_estimate_d2(f, x, 1.0, dl) - center(x - c) / 6) for dl in (0.2, 0.02)}
        assert exact[0.2] > exact[0.02]
        big = bias_check(f, x, EstimatorConfig(1.0, 0.2, 2), 10**6, DirichletSampler(1.0, 2, 13))
        small = bias_check(f, x, EstimatorConfig(1.0, 0.02, 2), 10**6, DirichletSampler(1.0, 2, 14))
        assert big.bias_norm > small.bias_norm

    def test_streaming_matches_one_shot(self):
        f = from_id("psdquad:3", 3)
        x = np.array([0.5, 0.25, 0.25])
        cfg = EstimatorConfig(0.5, 0.1, 3)
        a = bias_check(f, x, cfg, 5000, DirichletSampler(0.5, 3, 15), chunk=777)
        G = raw_estimates(f, x, 0.1, DirichletSampler(0.5, 3, 15).sample_n(5000))
        np.testing.assert_allclose(a.mc_mean, G.mean(axis=0), rtol=1e-12, atol=1e-14)
        assert a.std_err == pytest.approx(np.sqrt(G.var(axis=0, ddof=1).sum() / 5000), rel=1e-10)

    def test_rejects_small_n_and_mismatch(self):
        f = make_linear([1.0, 0.0])
        with pytest.raises(ZOSimplexError):
            bias_check(f, [0.5, 0.5], EstimatorConfig(1.0, 0.1, 2), 10, DirichletSampler(1.0, 2, 0))
        with pytest.raises(ZOSimplexError):
            bias_check(f, [0.5, 0.5], EstimatorConfig(1.0, 0.1, 2), 1000, DirichletSampler(2.0, 2, 0))


def test_report_row_columns():
    f = make_linear([1.0, 0.0])
    rep = bias_check(f, [0.5, 0.5], EstimatorConfig(1.0, 0.1, 2), 1000, DirichletSampler(1.0, 2, 0))
    row = rep.to_row()
    assert list(row) == list(rep.FIELDS)
    assert row["objective_id"] == f.name and row["n"] == 1000 and row["cor_pass"] is None
