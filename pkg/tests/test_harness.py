import math

import numpy as np
import pytest

from hdsim import harness
from hdsim.errors import ParameterError
from hdsim.estimate import McSummary
from hdsim.harness import ExperimentConfig, ReportRow
from hdsim.lamperti import ModelParams


def cfg(**kw):
    kw.setdefault("params", ModelParams(0.5))
    return ExperimentConfig(**kw)


class TestConfig:
    @pytest.mark.parametrize("kw", [dict(eps_grid=(0.1, 0.2)), dict(eps_grid=(0.2, 0.2)), dict(level_grid=(12,)),
                                    dict(level_grid=(12, 10)), dict(theta_grid=(1.5,)), dict(n_paths=0),
                                    dict(workers=0), dict(t_end=0.0), dict(level=0), dict(times=(2.0,))])
    def test_invalid(self, kw):
        with pytest.raises(ParameterError):
            cfg(**kw)

    def test_workers_env(self, monkeypatch):
        monkeypatch.setenv("HDSIM_WORKERS", "3")
        assert harness.default_workers() == 3
        monkeypatch.setenv("HDSIM_WORKERS", "x")
        with pytest.raises(ParameterError):
            harness.default_workers()


class TestVerdict:
    def row(self, mean, passed):
        return ReportRow("r", McSummary(mean, 0.0, 1, mean, mean), passed)

    def test_rules(self):
        assert harness._verdict([self.row(1.0, True), self.row(2.0, True)]) == "pass"
        assert harness._verdict([self.row(1.0, True), self.row(2.0, False)]) == "fail"
        assert harness._verdict([self.row(math.nan, True)]) == "inconclusive"

    def test_series_rule(self):
        assert harness._series_ok([3, 2, 1])
        assert not harness._series_ok([3, 3, 1])
        assert harness._series_ok([3, 3.5, 1], max_inversions=1)
        assert not harness._series_ok([3, 4, 5], max_inversions=1)
        assert not harness._series_ok([3, math.nan, 1], max_inversions=1)
        assert harness._series_ok([1e-15, 3e-15], floor=1e-10)
        assert not harness._series_ok([1e-15, 3e-15])


class TestSelection:
    def test_requires_grid_and_alpha(self):
        with pytest.raises(ParameterError):
            harness.run_selection_experiment(cfg(n_paths=10))
        with pytest.raises(ParameterError):
            harness.run_selection_experiment(cfg(params=ModelParams(0.0), eps_grid=(0.1,), n_paths=10))

    def test_zero_eps_row(self):
        r = harness.run_selection_experiment(cfg(level=8, n_paths=64, eps_grid=(0.4, 0.1, 0.0)))
        assert r.row("sup_dist eps=0.0 (benchmark vs itself)").summary.mean == 0.0

    def test_away_from_zero(self):
        r = harness.run_selection_experiment(cfg(params=ModelParams(0.5, x0=1.0), level=12, n_paths=300,
                                                 eps_grid=(0.4, 0.2, 0.1, 0.05)))
        first = r.row("sup_dist eps=0.4").summary.mean
        last = r.row("sup_dist eps=0.05").summary.mean
        assert last * 2 <= first
        assert r.verdict == "pass"


class TestBracket:
    def test_control_row_exact(self):
        r = harness.run_bracket_experiment(cfg(params=ModelParams(0.5, 0.5, 1.0), n_paths=20, level_grid=(8, 10)))
        ctrl = [row for row in r.rows if row.kind == "control"][0]
        assert ctrl.summary.mean == pytest.approx(0.5, rel=1e-12) and ctrl.passed

    def test_benchmark_substitute(self):
        r = harness.run_bracket_experiment(cfg(params=ModelParams(0.5, 0.0, 1.0), n_paths=100,
                                               level_grid=(10, 12, 14)))
        assert r.verdict == "pass"

    def test_requires_level_grid(self):
        with pytest.raises(ParameterError):
            harness.run_bracket_experiment(cfg(params=ModelParams(0.5, 0.5), n_paths=10))


class TestSkew:
    def test_requires_zero_start(self):
        with pytest.raises(ParameterError):
            harness.run_skew_probability_experiment(cfg(params=ModelParams(0.5, x0=0.1), n_paths=10))

    def test_theta_one(self):
        r = harness.run_skew_probability_experiment(cfg(level=8, n_paths=200, theta_grid=(1.0,)))
        assert r.rows[0].summary.mean == 1.0 and r.verdict == "pass"

    @pytest.mark.slow
    def test_theta_minus_half(self):
        r = harness.run_skew_probability_experiment(cfg(level=8, n_paths=10_000, theta_grid=(-0.5,)))
        assert abs(r.rows[0].summary.mean - 0.25) <= 0.017
        assert r.verdict == "pass"

    def test_wrong_law_fails(self):
        # a control: compare theta = 0.5 samples against the theta = -0.5 target
        x = harness._concat(harness._map_chunks(harness._skew_chunk, 2000, 1, cfg(level=8), 0.5))["x"]
        target = 0.25
        assert abs(np.mean(x >= 0) - target) > 4 * math.sqrt(target * (1 - target) / x.size)


class TestWeak:
    def test_gaussian_case(self):
        r = harness.run_weak_construction_experiment(cfg(params=ModelParams(0.0, 0.7, 0.3), level=12, n_paths=1000))
        assert r.verdict == "pass", [(x.param, x.summary.mean, x.passed) for x in r.rows]

    def test_negative_alpha_residual_only(self):
        r = harness.run_weak_construction_experiment(cfg(params=ModelParams(-0.5, 0.5, 1.0), n_paths=100))
        assert all(row.param.startswith("median_ito_residual") for row in r.rows)
        assert r.verdict == "pass"

    def test_requires_eps(self):
        with pytest.raises(ParameterError):
            harness.run_weak_construction_experiment(cfg(n_paths=10))


class TestUniqueness:
    def test_zero_eps_refused(self):
        with pytest.raises(ParameterError):
            harness.run_uniqueness_experiment(cfg(n_paths=10, level_grid=(8, 10)))

    def test_large_eps(self):
        r = harness.run_uniqueness_experiment(cfg(params=ModelParams(0.5, 2.0), n_paths=100, level_grid=(10, 12, 14)))
        assert r.verdict == "pass"


class TestEquivalence:
    def test_alpha_range(self):
        with pytest.raises(ParameterError):
            harness.run_scheme_equivalence_experiment(cfg(params=ModelParams(-0.2, 0.5), level_grid=(8, 9)))


class TestMoments:
    def test_order_range(self):
        with pytest.raises(ParameterError):
            harness.run_moment_bound_experiment(cfg(params=ModelParams(0.5, 0.5), moment_order=-1.0, n_paths=10))
        with pytest.raises(ParameterError):
            harness.run_moment_bound_experiment(cfg(params=ModelParams(0.5, 0.5), moment_order=0.5, n_paths=10))

    def test_short_time(self):
        r = harness.run_moment_bound_experiment(cfg(params=ModelParams(0.5, 0.5, 5.0), n_paths=2000, times=(0.25,)))
        est = r.rows[1].summary.mean
        assert est == pytest.approx(5 ** -0.5, rel=0.1)

    def test_off_grid_time(self):
        with pytest.raises(ParameterError):
            harness.run_moment_bound_experiment(cfg(params=ModelParams(0.5, 0.5), n_paths=10, times=(0.3,)))


class TestDeterminism:
    def test_repeat_and_workers(self):
        base = dict(params=ModelParams(0.5, 0.5, 1.0), n_paths=150, level_grid=(8, 10))
        a = harness.run_bracket_experiment(cfg(**base))
        b = harness.run_bracket_experiment(cfg(**base))
        c = harness.run_bracket_experiment(cfg(workers=2, **base))
        rows = lambda r: [(x.param, x.summary, x.passed) for x in r.rows]
        assert rows(a) == rows(b) == rows(c)

    def test_run_experiment_dispatch(self):
        with pytest.raises(ParameterError):
            harness.run_experiment("nope", cfg())
