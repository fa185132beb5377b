import numpy as np
import pytest
from scipy.stats import kstest

from piezoharvest import (
    CEConfig,
    DesignSpace,
    Evaluation,
    default_elite,
    OptimizationResult,
    mle_update,
    optimize,
    sample_truncated_gaussian,
    select_elite,
    smooth_update,
    write_trace_csv,
)


def quadratic_objective(center, feasible=True):
    """Toy objective peaked at ``center``; mimics the Evaluation contract."""

    def call(design, rng):
        power = float(-np.sum((np.asarray(design) - center) ** 2))
        return Evaluation(
            design=np.asarray(design, float).copy(),
            power=power,
            k=0.0 if feasible else 1.0,
            penalized=power if feasible else power - 9.0,
            feasible=feasible,
        )

    return call


def unit_space(dim):
    names = ("f", "omega", "chi", "kappa")[:dim]
    fixed = {
        n: 0.5
        for n in ("xi", "chi", "lam", "kappa", "f", "omega")
        if n not in names
    }
    return DesignSpace(
        names=names, lower=np.full(dim, 0.01), upper=np.ones(dim), fixed=fixed
    )


class TestCEConfig:
    def test_defaults_valid(self):
        CEConfig()

    def test_default_elite_half_rounds_up(self):
        assert default_elite(25) == 3
        assert default_elite(50) == 5
        assert default_elite(75) == 8
        assert default_elite(100) == 10
        assert default_elite(5) == 1

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(n_samples=5, n_elite=5),
            dict(max_levels=0),
            dict(tol=0.0),
            dict(smooth_alpha=0.0),
            dict(smooth_beta=0.5),
            dict(smooth_q=3.0),
        ],
    )
    def test_rejects_bad(self, kwargs):
        with pytest.raises(ValueError):
            CEConfig(**kwargs)


class TestSampler:
    def test_within_bounds(self, rng):
        lo, hi = np.array([0.0, -1.0]), np.array([1.0, 1.0])
        x = sample_truncated_gaussian(
            np.array([0.5, 0.0]), np.array([5.0, 5.0]), lo, hi, 500, rng
        )
        assert x.shape == (500, 2)
        assert np.all(x >= lo) and np.all(x <= hi)

    def test_zero_sigma_clamps_mean(self, rng):
        x = sample_truncated_gaussian(
            np.array([2.0]), np.array([0.0]), np.array([0.0]), np.array([1.0]), 10, rng
        )
        np.testing.assert_array_equal(x, np.ones((10, 1)))

    def test_huge_sigma_is_near_uniform(self, rng):
        x = sample_truncated_gaussian(
            np.array([0.5]), np.array([100.0]), np.array([0.0]), np.array([1.0]),
            3000, rng,
        )
        assert kstest(x[:, 0], "uniform").pvalue > 0.01

    def test_inverse_cdf_fallback(self, rng):
        # mean 60 sigma away from the box: rejection would stall
        x = sample_truncated_gaussian(
            np.array([60.0]), np.array([1.0]), np.array([0.0]), np.array([1.0]),
            50, rng,
        )
        assert np.all((x >= 0.0) & (x <= 1.0))

    def test_negative_sigma_rejected(self, rng):
        with pytest.raises(ValueError):
            sample_truncated_gaussian(
                np.array([0.5]), np.array([-1.0]), np.array([0.0]), np.array([1.0]),
                5, rng,
            )


class TestEliteAndUpdates:
    def test_select_elite_hand_case(self):
        scores = np.array([0.1, 0.9, 0.5, 0.7])
        elite, gamma = select_elite(scores, 2)
        assert list(elite) == [1, 3]
        assert gamma == 0.7

    def test_select_elite_tie_break(self):
        elite, _ = select_elite(np.array([1.0, 1.0, 1.0]), 2)
        assert list(elite) == [0, 1]

    def test_mle_update_hand_case(self):
        mu, sigma = mle_update(np.array([[0.0, 2.0], [2.0, 4.0]]))
        np.testing.assert_allclose(mu, [1.0, 3.0])
        np.testing.assert_allclose(sigma, [1.0, 1.0])  # biased: sqrt(mean sq dev)

    def test_smooth_update_level1_and_beta_decay(self):
        cfg = CEConfig()
        mu_new, sig_new = np.array([1.0]), np.array([1.0])
        mu_prev, sig_prev = np.array([0.0]), np.array([0.0])
        mu, sig = smooth_update((mu_new, sig_new), (mu_prev, sig_prev), 1, cfg)
        assert mu[0] == pytest.approx(0.7)
        assert sig[0] == pytest.approx(0.8)  # beta_1 = beta
        _, sig5 = smooth_update((mu_new, sig_new), (mu_prev, sig_prev), 5, cfg)
        # beta_5 = 0.8 - 0.8 * (4/5)^5 = 0.8 - 0.8 * 0.32768 = 0.537856
        assert sig5[0] == pytest.approx(0.537856, abs=1e-12)

    def test_beta_t_decreases(self):
        cfg = CEConfig()
        ones = np.ones(1)
        zeros = np.zeros(1)
        betas = [
            smooth_update((ones, ones), (zeros, zeros), t, cfg)[1][0]
            for t in range(1, 20)
        ]
        assert all(b1 > b2 for b1, b2 in zip(betas, betas[1:]))


class TestOptimize:
    def test_converges_on_quadratic(self):
        space = unit_space(2)
        center = np.array([0.3, 0.6])
        wins = 0
        for seed in range(10):
            cfg = CEConfig(n_samples=40, n_elite=4, tol=1e-3, seed=seed)
            res = optimize(quadratic_objective(center), space, cfg)
            if np.linalg.norm(res.x_star - center) < 0.02:
                wins += 1
        assert wins >= 9

    def test_result_bookkeeping(self):
        space = unit_space(2)
        cfg = CEConfig(n_samples=30, n_elite=3, tol=1e-2, seed=0)
        res = optimize(quadratic_objective(np.array([0.4, 0.4])), space, cfg)
        assert isinstance(res, OptimizationResult)
        assert res.converged
        assert res.evaluations_used == res.levels_used * 30
        assert len(res.trace) == res.levels_used
        assert res.feasible
        assert space.contains(res.x_star)

    def test_infeasible_fallback(self):
        space = unit_space(2)
        cfg = CEConfig(n_samples=20, n_elite=2, tol=1e-2, seed=1, max_levels=5)
        res = optimize(
            quadratic_objective(np.array([0.5, 0.5]), feasible=False), space, cfg
        )
        assert not res.feasible
        assert res.s_star == pytest.approx(res.power_star - 9.0)

    def test_deterministic_given_seed(self):
        space = unit_space(2)
        cfg = CEConfig(n_samples=25, n_elite=3, tol=1e-2, seed=77)
        a = optimize(quadratic_objective(np.array([0.2, 0.8])), space, cfg)
        b = optimize(quadratic_objective(np.array([0.2, 0.8])), space, cfg)
        np.testing.assert_array_equal(a.x_star, b.x_star)
        assert a.levels_used == b.levels_used
        for ra, rb in zip(a.trace, b.trace):
            np.testing.assert_array_equal(ra.mu, rb.mu)

    def test_level_cap(self):
        space = unit_space(2)
        cfg = CEConfig(n_samples=20, n_elite=2, tol=1e-12, seed=0, max_levels=3)
        res = optimize(quadratic_objective(np.array([0.5, 0.5])), space, cfg)
        assert res.levels_used == 3
        assert not res.converged


class TestTraceCSV:
    def test_header_and_rows(self, tmp_path):
        space = unit_space(2)
        cfg = CEConfig(n_samples=20, n_elite=2, tol=1e-2, seed=0, max_levels=4)
        res = optimize(quadratic_objective(np.array([0.5, 0.5])), space, cfg)
        path = tmp_path / "trace.csv"
        write_trace_csv(res.trace, space.dim, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "level,P,K,mu_1,mu_2,sigma_1,sigma_2"
        assert len(lines) == 1 + res.levels_used
        first = lines[1].split(",")
        assert int(first[0]) == 1
        assert float(first[1]) == res.trace[0].power
