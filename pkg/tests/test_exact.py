import math

import numpy as np
import pytest

from hdsim import estimate, exact, integrate, noise
from hdsim.errors import ParameterError
from hdsim.lamperti import ModelParams, f0, f_eps
from hdsim.noise import Path

from conftest import bm_batch


def const(p, c):
    return Path(p, np.full(p.n_steps + 1, float(c)))


class TestBenchmark:
    def test_zero_noise(self):
        p = noise.make_partition(1.0, 4)
        np.testing.assert_allclose(exact.benchmark_path(const(p, 0.0), 0.7, 0.5).values, 0.7, rtol=1e-15)

    def test_value(self):
        p = noise.make_partition(1.0, 2)
        assert exact.benchmark_path(const(p, 2.0), 0.0, 0.5).values[-1] == 1.0

    def test_odd(self):
        b = noise.sample_bm(noise.make_partition(1.0, 8), 1, 0)
        neg = Path(b.partition, -b.values)
        np.testing.assert_array_equal(exact.benchmark_path(neg, 0.0, 0.5).values,
                                      -exact.benchmark_path(b, 0.0, 0.5).values)

    def test_f0_round_trip(self):
        b = noise.sample_bm(noise.make_partition(1.0, 10), 1, 0)
        for x0 in (-1.3, 0.0, 0.4):
            x = exact.benchmark_path(b, x0, 0.3).values
            np.testing.assert_allclose(f0(x, 0.3), f0(x0, 0.3) + b.values, atol=1e-9)

    def test_alpha_range(self):
        with pytest.raises(ParameterError):
            exact.benchmark_path(const(noise.make_partition(1.0, 2), 0.0), 0.0, -0.5)


class TestRegularized:
    def test_zero_noise(self):
        p = noise.make_partition(1.0, 3)
        np.testing.assert_allclose(exact.regularized_exact_path(const(p, 0.0), 0.6, ModelParams(0.5, 0.5)).values,
                                   0.6, rtol=1e-12)

    @pytest.mark.parametrize("eps", [0.3, 1.0])
    def test_alpha_zero_linear(self, eps):
        w = noise.sample_bm(noise.make_partition(1.0, 8), 2, 0)
        z = exact.regularized_exact_path(w, 0.4, ModelParams(0.0, eps)).values
        np.testing.assert_allclose(z, 0.4 + math.sqrt(1 + eps ** 2) * w.values, atol=1e-9)

    def test_alpha_half(self):
        p = noise.make_partition(1.0, 1)
        z = exact.regularized_exact_path(const(p, 2 * (math.sqrt(2) - 1)), 0.0, ModelParams(0.5, 1.0))
        assert z.values[-1] == pytest.approx(1.0, abs=1e-6)

    def test_requires_eps(self):
        with pytest.raises(ParameterError):
            exact.regularized_exact_path(const(noise.make_partition(1.0, 1), 0.0), 0.0, ModelParams(0.5))


class TestPlateau:
    def test_degenerate(self):
        b = noise.sample_bm(noise.make_partition(1.0, 8), 3, 0)
        np.testing.assert_array_equal(exact.plateau_path(b, 0.5, 0, 0).values, exact.benchmark_path(b, 0.0, 0.5).values)

    def test_absorbed(self):
        p = noise.make_partition(1.0, 6)
        v = 0.3 * np.sin(np.linspace(0, 7, p.n_steps + 1))
        assert np.all(exact.plateau_path(Path(p, v), 0.5, 0.4, 0.35).values == 0.0)

    @pytest.mark.slow
    def test_positive_occupation(self):
        p, b = bm_batch(10, 10_000, seed=4)
        occ = estimate.occupation_time_values(exact.f_ab_inv(b, 0.5, 0.5, 0.5), 0.0, p.mesh)
        assert occ.mean() > 0.1
        # lower bound: occupation of [-0.5 + eta, 0.5 - eta] by B
        assert occ.mean() >= estimate.occupation_time_values(b, 0.45, p.mesh).mean()


class TestSkewSolution:
    def test_theta_zero_is_benchmark(self):
        p = noise.make_partition(1.0, 8)
        bt = noise.sample_skew_bm(p, noise.SkewParams(0.0, f0(0.3, 0.5)), 1, 0)
        np.testing.assert_allclose(exact.skew_solution_path(bt, 0.5).values[0], 0.3, rtol=1e-15)

    def test_theta_one_nonnegative(self):
        p = noise.make_partition(1.0, 8)
        bt = noise.sample_skew_bm(p, noise.SkewParams(1.0, 0.0), 1, 0)
        assert np.all(exact.skew_solution_path(bt, 0.5).values >= 0)

    @pytest.mark.slow
    def test_theta_half_sign_probability(self):
        p = noise.make_partition(1.0, 10)
        bt = noise.sample_skew_bm_batch(p, noise.SkewParams(0.5, 0.0), 9, range(10_000))
        x = exact.f0_inv(bt[:, -1], 0.5)
        assert abs(np.mean(x >= 0) - 0.75) <= 0.013


class TestWeakTriple:
    mp = ModelParams(0.5, 0.5)

    def pair(self, level=10, i=0):
        p = noise.make_partition(1.0, level)
        return noise.sample_bm(p, 5, i, 0), noise.sample_bm(p, 5, i, 1)

    def test_structure(self):
        w1, w2 = self.pair()
        tr = exact.weak_solution_triple(w1, w2, 0.3, self.mp)
        assert tr.y.values[0] == pytest.approx(0.3, abs=1e-12)
        assert tr.b.values[0] == 0.0 and tr.w.values[0] == 0.0

    def test_increment_bound(self):
        w1, w2 = self.pair()
        tr = exact.weak_solution_triple(w1, w2, 0.0, self.mp)
        bound = np.abs(np.diff(w1.values)) + np.abs(np.diff(w2.values))
        assert np.all(np.abs(np.diff(tr.b.values)) <= bound * (1 + 1e-12))
        assert np.all(np.abs(np.diff(tr.w.values)) <= bound * (1 + 1e-12))

    def test_quadratic_variation_single_path(self):
        w1, w2 = self.pair(14)
        tr = exact.weak_solution_triple(w1, w2, 0.0, self.mp)
        assert abs(estimate.quadratic_covariation(tr.b, tr.b).values[-1] - 1.0) < 0.05

    def test_ito_residual_decreases(self):
        levels = (10, 12, 14, 16)
        res = {L: [] for L in levels}
        for i in range(100):
            pairs = noise.coupled_pairs(1.0, levels, 5, i)
            for L in levels:
                tr = exact.weak_solution_triple(pairs[L].b, pairs[L].w, 0.0, self.mp)
                res[L].append(estimate.ito_residual(tr.y, tr.b, tr.w, 0.0, self.mp))
        med = [np.median(res[L]) for L in levels]
        assert all(b < a for a, b in zip(med, med[1:]))

    def test_requires_eps(self):
        w1, w2 = self.pair(4)
        with pytest.raises(ParameterError):
            exact.weak_solution_triple(w1, w2, 0.0, ModelParams(0.5))


class TestRotatedNoise:
    def test_zero_solution(self):
        mp = ModelParams(0.5, 0.3)
        pair = noise.sample_bm_pair(noise.make_partition(1.0, 8), 1, 0)
        r = exact.recover_rotated_noise(const(pair.partition, 0.0), pair.b, pair.w, mp)
        np.testing.assert_allclose(r.w1.values, (pair.b.values + pair.w.values) / math.sqrt(2), atol=1e-14)
        # normalized rotation: with Y = 0 the combined noise is W itself
        np.testing.assert_allclose(r.w_hat.values, pair.w.values, atol=1e-14)

    def test_w_hat_identity(self):
        mp = ModelParams(0.5, 0.3)
        pair = noise.sample_bm_pair(noise.make_partition(1.0, 10), 1, 0)
        y = integrate.euler_maruyama_ito(pair, 0.5, mp)
        r = exact.recover_rotated_noise(y, pair.b, pair.w, mp)
        np.testing.assert_allclose(r.w_hat.values, (r.w1.values + r.w2.values) / math.sqrt(2), atol=1e-12)
        a = np.abs(y.values[:-1]) ** 0.5
        want = (a * np.diff(pair.b.values) + 0.3 * np.diff(pair.w.values)) / np.hypot(a, 0.3)
        np.testing.assert_allclose(np.diff(r.w_hat.values), want, atol=1e-14)

    def test_inverse_of_weak_triple(self):
        # rotating the constructed (B~, W~) back recovers (w1, w2) up to left-point bookkeeping
        mp = ModelParams(0.5, 0.5)
        p = noise.make_partition(1.0, 10)
        w1, w2 = noise.sample_bm(p, 2, 0, 0), noise.sample_bm(p, 2, 0, 1)
        tr = exact.weak_solution_triple(w1, w2, 0.0, mp)
        r = exact.recover_rotated_noise(tr.y, tr.b, tr.w, mp)
        np.testing.assert_allclose(r.w1.values, w1.values, atol=1e-12)
        np.testing.assert_allclose(r.w2.values, w2.values, atol=1e-12)

    def test_reconstruction_decreases(self):
        mp = ModelParams(0.5, 0.25)
        levels = (10, 12, 14, 16)
        res = {L: [] for L in levels}
        for i in range(100):
            pairs = noise.coupled_pairs(1.0, levels, 8, i)
            for L in levels:
                y = integrate.euler_maruyama_ito(pairs[L], 0.0, mp)
                r = exact.recover_rotated_noise(y, pairs[L].b, pairs[L].w, mp)
                table_f = exact.transform_table(mp).f(y.values)
                res[L].append(np.max(np.abs(table_f - f_eps(0.0, mp) - r.w_hat.values)))
        med = [np.median(res[L]) for L in levels]
        assert all(b < a for a, b in zip(med, med[1:]))
