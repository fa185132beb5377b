import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from piezoharvest import (
    InsufficientLength,
    SeriesTooShort,
    Test01Config,
    classify,
    correlation_k,
    msd,
    translation_vars,
)


def logistic(r, n, x0=0.1, burn=200):
    x = x0
    for _ in range(burn):
        x = r * x * (1 - x)
    out = np.empty(n)
    for i in range(n):
        x = r * x * (1 - x)
        out[i] = x
    return out


def msd_bruteforce(p, q, n_max):
    n_pts = len(p)
    m = np.empty(n_max)
    for n in range(1, n_max + 1):
        dp = p[n:] - p[:-n]
        dq = q[n:] - q[:-n]
        m[n - 1] = np.mean(dp * dp + dq * dq)
    return m


class TestTranslationVars:
    def test_hand_case(self):
        # phi = (1, 1), c = pi/2: p = (cos c, cos c + cos 2c) = (0, -1)
        p, q = translation_vars(np.ones(2), np.pi / 2)
        np.testing.assert_allclose(p, [0.0, -1.0], atol=1e-15)
        np.testing.assert_allclose(q, [1.0, 1.0], atol=1e-15)

    def test_linearity(self, rng):
        phi = rng.normal(size=50)
        p1, q1 = translation_vars(phi, 1.3)
        p2, q2 = translation_vars(3.0 * phi, 1.3)
        np.testing.assert_allclose(p2, 3.0 * p1)
        np.testing.assert_allclose(q2, 3.0 * q1)

    def test_rejects_short(self):
        with pytest.raises(ValueError):
            translation_vars(np.ones(1), 1.0)


class TestMSD:
    def test_matches_bruteforce(self, rng):
        p = np.cumsum(rng.normal(size=400))
        q = np.cumsum(rng.normal(size=400))
        n_max = 40
        np.testing.assert_allclose(
            msd(p, q, n_max), msd_bruteforce(p, q, n_max), rtol=1e-10
        )

    def test_ballistic_growth(self):
        # p_j = j, q = 0: every increment over lag n equals n, so M_n = n^2
        n = 200
        p = np.arange(1.0, n + 1)
        q = np.zeros(n)
        m = msd(p, q, 20)
        np.testing.assert_allclose(m, np.arange(1.0, 21) ** 2, rtol=1e-12)

    def test_diffusive_growth_on_random_walks(self):
        # average M_n over many +-1 walks approaches n
        rng = np.random.default_rng(5)
        n_max, acc = 10, np.zeros(10)
        n_seeds = 150
        for _ in range(n_seeds):
            steps = rng.choice([-1.0, 1.0], size=500)
            p = np.cumsum(steps)
            acc += msd(p, np.zeros(500), n_max)
        np.testing.assert_allclose(acc / n_seeds, np.arange(1.0, 11), rtol=0.15)

    def test_bad_n_max(self):
        p = np.zeros(50)
        with pytest.raises(InsufficientLength):
            msd(p, p, 50)
        with pytest.raises(InsufficientLength):
            msd(p, p, 0)

    @given(n_max=st.integers(1, 30))
    @settings(max_examples=20, deadline=None)
    def test_fft_exactness_property(self, n_max):
        rng = np.random.default_rng(n_max)
        p = rng.normal(size=120)
        q = rng.normal(size=120)
        np.testing.assert_allclose(
            msd(p, q, n_max), msd_bruteforce(p, q, n_max), rtol=1e-9, atol=1e-12
        )


class TestCorrelationK:
    def test_perfect_line(self):
        t = np.arange(10.0)
        assert correlation_k(t, 2.0 * t + 1.0) == pytest.approx(1.0)
        assert correlation_k(t, -t) == pytest.approx(-1.0)

    def test_constant_m_is_degenerate(self):
        assert correlation_k(np.arange(5.0), np.ones(5)) == 0.0

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            correlation_k(np.arange(4.0), np.arange(5.0))


class TestClassify:
    def test_chaotic_logistic(self, rng):
        k = classify(logistic(3.97, 3000), Test01Config(), rng).k
        assert k > 0.9

    def test_periodic_logistic(self, rng):
        k = classify(logistic(3.2, 3000), Test01Config(), rng).k
        assert abs(k) < 0.1

    def test_quasiperiodic_cosine(self, rng):
        phi = np.cos(np.sqrt(2.0) * np.arange(4000))
        k = classify(phi, Test01Config(), rng).k
        assert abs(k) < 0.1

    def test_constant_series_convention(self, rng):
        res = classify(np.full(500, 2.5), Test01Config(), rng)
        assert res.k == 0.0
        assert res.degenerate.all()

    def test_scale_invariance(self):
        phi = logistic(3.97, 2000)
        k1 = classify(phi, Test01Config(), np.random.default_rng(1)).k
        k2 = classify(100.0 * phi, Test01Config(), np.random.default_rng(1)).k
        assert k1 == pytest.approx(k2, abs=1e-9)

    def test_seed_reproducibility(self):
        phi = logistic(3.8, 1500)
        a = classify(phi, Test01Config(), np.random.default_rng(9))
        b = classify(phi, Test01Config(), np.random.default_rng(9))
        assert a.k == b.k
        np.testing.assert_array_equal(a.c_values, b.c_values)

    def test_c_values_in_band(self, rng):
        cfg = Test01Config(n_c=40)
        res = classify(logistic(3.6, 600), cfg, rng)
        assert np.all(res.c_values > cfg.c_min)
        assert np.all(res.c_values < cfg.c_max)
        assert len(res.k_c_values) == 40

    def test_short_series_rejected(self, rng):
        with pytest.raises(SeriesTooShort):
            classify(np.ones(99), Test01Config(), rng)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            Test01Config(n_c=0)
        with pytest.raises(ValueError):
            Test01Config(c_min=2.0, c_max=1.0)
        with pytest.raises(ValueError):
            Test01Config(n_cut_fraction=0.9)
