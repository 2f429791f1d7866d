import numpy as np
import pytest

from hdsim import _pykernels, estimate, integrate, kernels, noise
from hdsim.errors import NumericalError, ParameterError
from hdsim.integrate import SchemeConfig
from hdsim.lamperti import ModelParams
from hdsim.noise import NoisePair, Path


def deterministic_pair(p, b_vals, w_vals=None):
    w_vals = np.zeros(p.n_steps + 1) if w_vals is None else w_vals
    return NoisePair(Path(p, b_vals), Path(p, w_vals), 0, 0)


class TestConfig:
    def test_invalid(self):
        with pytest.raises(ParameterError):
            SchemeConfig(scheme="milstein")
        with pytest.raises(ParameterError):
            SchemeConfig(taming="soft")
        with pytest.raises(ParameterError):
            SchemeConfig(clip_scale=0.0)


class TestEuler:
    def test_hand_step(self):
        y, _ = kernels.euler_ito(1.0, np.array([[0.1]]), np.zeros((1, 1)), 0.01, 0.5, 0.0)
        assert y[0, 1] == pytest.approx(1.1025, abs=1e-15)

    def test_zero_state_step(self):
        y, _ = kernels.euler_ito(0.0, np.array([[0.3]]), np.array([[0.2]]), 0.01, 0.4, 0.5)
        assert y[0, 1] == pytest.approx(0.5 * 0.2, abs=1e-16)

    def test_drift_flow(self):
        p = noise.make_partition(1.0, 14)
        y = integrate.euler_maruyama_ito(deterministic_pair(p, np.zeros(p.n_steps + 1)), 1.0, ModelParams(0.5))
        assert y.values[-1] == pytest.approx(1.25, abs=1e-3)

    def test_rejects_level_zero(self):
        p = noise.make_partition(1.0, 0)
        with pytest.raises(ParameterError):
            integrate.euler_maruyama_ito(deterministic_pair(p, np.zeros(2)), 1.0, ModelParams(0.5))

    def test_negative_alpha_needs_clip(self):
        pair = noise.sample_bm_pair(noise.make_partition(1.0, 6), 1, 0)
        with pytest.raises(ParameterError, match="clip"):
            integrate.euler_maruyama_ito(pair, 0.0, ModelParams(-0.5, 0.5))
        y = integrate.euler_maruyama_ito(pair, 0.0, ModelParams(-0.5, 0.5), SchemeConfig(taming="clip"))
        assert np.all(np.isfinite(y.values))

    def test_clip_caps_drift(self):
        # drift (alpha/2) y^(2 alpha - 1) at y = 1e-6, alpha = -0.5 is -0.25e12; capped at 1/sqrt(dt)
        dt = 1e-4
        y, _ = kernels.euler_ito(1e-6, np.zeros((1, 1)), np.zeros((1, 1)), dt, -0.5, 0.0, 1.0 / np.sqrt(dt))
        assert y[0, 1] == pytest.approx(1e-6 - np.sqrt(dt), rel=1e-12)

    def test_overflow_reported(self):
        db = np.full((1, 8), 1e200)
        with pytest.raises(NumericalError, match="step"):
            integrate.euler_values(1e200, db, np.zeros((1, 8)), noise.make_partition(1.0, 3), ModelParams(0.9))

    def test_mesh_self_consistency(self):
        mp = ModelParams(0.5, 0.25)
        levels = (10, 11, 12, 13, 14, 15, 16)
        gaps = {L: [] for L in levels[1:]}
        for i in range(100):
            pairs = noise.coupled_pairs(1.0, levels, 3, i)
            ys = {L: integrate.euler_maruyama_ito(pairs[L], 0.0, mp).values[-1] for L in levels}
            for a, b in zip(levels, levels[1:]):
                gaps[b].append(abs(ys[b] - ys[a]))
        med = [np.median(gaps[L]) for L in levels[1:]]
        inversions = sum(b >= a for a, b in zip(med, med[1:]))
        assert med[-1] < med[0] and inversions <= 1


class TestHeun:
    def test_ode_oracle(self):
        p = noise.make_partition(1.0, 14)
        y = integrate.heun_stratonovich(deterministic_pair(p, p.times.copy()), 1.0, ModelParams(0.5))
        want = (0.5 * p.times + 1.0) ** 2
        assert np.max(np.abs(y.values - want)) < 1e-3

    def test_zero_absorbing(self):
        y, _ = kernels.heun_strat(0.0, np.array([[0.3, -0.2]]), np.zeros((1, 2)), 0.5, 0.0)
        assert np.all(y == 0.0)

    def test_alpha_range(self):
        pair = noise.sample_bm_pair(noise.make_partition(1.0, 4), 1, 0)
        with pytest.raises(ParameterError):
            integrate.heun_stratonovich(pair, 0.0, ModelParams(-0.3, 0.5))

    def test_solve_dispatch(self):
        pair = noise.sample_bm_pair(noise.make_partition(1.0, 6), 1, 0)
        mp = ModelParams(0.5, 0.5)
        h = integrate.solve(pair, 1.0, mp, SchemeConfig(scheme="heun_stratonovich"))
        assert np.array_equal(h.values, integrate.heun_stratonovich(pair, 1.0, mp).values)

    def test_matches_euler_under_refinement(self):
        mp = ModelParams(0.5, 0.5)
        levels = (10, 12, 14, 16)
        diffs = {L: [] for L in levels}
        for i in range(100):
            pairs = noise.coupled_pairs(1.0, levels, 6, i)
            for L in levels:
                e = integrate.euler_maruyama_ito(pairs[L], 1.0, mp).values[-1]
                h = integrate.heun_stratonovich(pairs[L], 1.0, mp).values[-1]
                diffs[L].append(abs(e - h))
        med = [np.median(diffs[L]) for L in levels]
        assert all(b < a for a, b in zip(med, med[1:]))


class TestSums:
    def test_constant_integrand(self):
        b = noise.sample_bm(noise.make_partition(1.0, 8), 1, 0)
        one = Path(b.partition, np.ones(b.partition.n_steps + 1))
        np.testing.assert_allclose(integrate.ito_sum(one, b).values, b.values - b.values[0], atol=1e-14)
        three = Path(b.partition, np.full(b.partition.n_steps + 1, 3.0))
        np.testing.assert_allclose(integrate.stratonovich_sum(three, b).values, 3 * b.values, atol=1e-13)
        zero = Path(b.partition, np.zeros(b.partition.n_steps + 1))
        assert np.all(integrate.ito_sum(zero, b).values == 0)

    def test_ito_formula(self):
        b = noise.sample_bm(noise.make_partition(1.0, 16), 1, 0)
        assert abs(integrate.ito_sum(b, b).values[-1] - (b.values[-1] ** 2 - 1) / 2) < 0.02

    def test_stratonovich_telescopes(self):
        b = noise.sample_bm(noise.make_partition(1.0, 12), 1, 0)
        assert integrate.stratonovich_sum(b, b).values[-1] == pytest.approx(b.values[-1] ** 2 / 2, abs=1e-12)

    def test_correction_identity(self):
        pair = noise.sample_bm_pair(noise.make_partition(1.0, 10), 2, 0)
        x = Path(pair.partition, np.sin(pair.w.values) + pair.b.values)
        s = integrate.stratonovich_sum(x, pair.b).values
        i = integrate.ito_sum(x, pair.b).values
        qc = estimate.quadratic_covariation(x, pair.b).values
        np.testing.assert_allclose(s, i + 0.5 * qc, atol=1e-13)

    def test_partition_mismatch(self):
        a = noise.sample_bm(noise.make_partition(1.0, 3), 1, 0)
        b = noise.sample_bm(noise.make_partition(1.0, 4), 1, 0)
        with pytest.raises(ParameterError):
            integrate.ito_sum(a, b)
        with pytest.raises(ParameterError):
            integrate.stratonovich_sum(a, b)


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled extension not built")
class TestBackends:
    def setup_method(self):
        g = np.random.default_rng(3)
        self.db = g.standard_normal((5, 512)) * 0.05
        self.dw = g.standard_normal((5, 512)) * 0.05
        self.u = g.random((5, 512))

    @pytest.mark.parametrize("alpha,eps,cap", [(0.5, 0.25, np.inf), (0.3, 0.0, np.inf), (-0.5, 0.5, 30.0),
                                               (0.0, 1.0, np.inf)])
    def test_euler_agree(self, alpha, eps, cap):
        a = kernels.euler_ito(0.1, self.db, self.dw, 1 / 512, alpha, eps, cap)
        b = kernels.euler_ito(0.1, self.db, self.dw, 1 / 512, alpha, eps, cap, impl=_pykernels)
        # libm and numpy pow may differ in the last ulp; the singular drift amplifies it
        np.testing.assert_allclose(a[0], b[0], rtol=1e-9, atol=1e-11)
        np.testing.assert_array_equal(a[1], b[1])

    @pytest.mark.parametrize("alpha,eps", [(0.5, 0.5), (0.0, 0.2), (0.8, 0.0)])
    def test_heun_agree(self, alpha, eps):
        a = kernels.heun_strat(0.3, self.db, self.dw, alpha, eps)
        b = kernels.heun_strat(0.3, self.db, self.dw, alpha, eps, impl=_pykernels)
        np.testing.assert_allclose(a[0], b[0], rtol=1e-12, atol=1e-14)

    def test_walk_agree(self):
        np.testing.assert_array_equal(kernels.skew_walk(2, self.u, 0.8), kernels.skew_walk(2, self.u, 0.8, impl=_pykernels))

    def test_bad_step_agree(self):
        db = np.full((2, 4), 1e300)
        a = kernels.euler_ito(1e300, db, np.zeros((2, 4)), 0.25, 0.9, 0.0)
        b = kernels.euler_ito(1e300, db, np.zeros((2, 4)), 0.25, 0.9, 0.0, impl=_pykernels)
        np.testing.assert_array_equal(a[1], b[1])
        assert np.all(a[1] >= 0)
