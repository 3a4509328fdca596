import numpy as np
import pytest

from roguewk import (
    BenchmarkSpec,
    ConfidenceSettings,
    load_config,
    regret_proxy_curve,
    relative_improvement,
    run_benchmark,
    run_episode,
    solve,
    summarize,
    true_lp_instance,
)
from roguewk.harness import RunRecord, resolve_workers

from conftest import stationary_doc


def _tiny_doc(T=60, budget=10.0):
    return {
        "arms": [
            {"A": 0.3, "B": -0.6, "K": 0.5, "alpha": 0.2, "beta": 1.0,
             "cost_low": [0.2], "cost_high": [0.4]},
            {"A": 0.6, "B": -0.8, "K": 0.3, "alpha": -0.2, "beta": 0.8,
             "cost_low": [0.1], "cost_high": [0.3]},
        ],
        "x0": [0.2, 0.5], "T": T, "budget": budget, "seed": 0,
    }


class TestRunEpisode:
    def test_immediate_exhaustion_counts_only_pre_violation_rounds(self):
        doc = _tiny_doc(T=20)
        doc["arms"] = [dict(a, cost_low=[0.5], cost_high=[0.5]) for a in doc["arms"]]
        config = load_config({**doc, "budget": 0.6})
        record = run_episode(config, "naive_ucb", seed=3)
        assert record.tau == 2  # second pull pushes 1.0 over 0.6
        assert record.plays == 1
        assert record.cumulative_reward <= 1.0

    def test_slack_budget_runs_to_horizon(self):
        config = load_config({**_tiny_doc(T=25), "budget": 25.0})
        record = run_episode(config, "naive_ucb", seed=4)
        assert record.tau == config.T + 1
        assert record.plays == config.T

    def test_identical_seed_reproduces_record(self):
        config = load_config(_tiny_doc())
        a = run_episode(config, "roguewk_ucb", seed=11)
        b = run_episode(config, "roguewk_ucb", seed=11)
        assert a == b

    def test_avg_reward_consistency(self):
        config = load_config(_tiny_doc())
        for policy in ("roguewk_ucb", "naive_ucb", "sw_ucb"):
            rec = run_episode(config, policy, seed=5)
            assert rec.avg_reward_per_play * max(rec.plays, 1) == pytest.approx(
                rec.cumulative_reward, abs=1e-9)
            assert rec.tau <= config.T + 1
            assert rec.plays <= rec.tau
            assert sum(rec.per_arm_pulls) == rec.plays

    def test_trace_replay_reconstructs_budget_accounting(self):
        config = load_config(_tiny_doc(T=40, budget=4.0))
        record, trace = run_episode(config, "sw_ucb", seed=6, collect_trace=True)
        spent = np.zeros(config.d)
        for i, row in enumerate(trace):
            before_ok = np.all(spent <= config.budget)
            assert before_ok
            spent = spent + row.cost
            if i < len(trace) - 1:
                assert np.all(spent <= config.budget)
        if record.tau <= config.T:
            assert np.any(spent > config.budget)
        assert len(trace) == min(record.tau, config.T)


class TestBenchmark:
    def _spec(self, tmp_path, **kw):
        defaults = dict(
            config=_tiny_doc(),
            budgets=[4.0, 8.0],
            replicates=2,
            policies=["roguewk_ucb", "sw_ucb"],
            seed=100,
            output_dir=str(tmp_path / "out"),
            confidence=ConfidenceSettings(xi=1.0),
        )
        defaults.update(kw)
        return BenchmarkSpec(**defaults)

    def test_minimal_grid_single_record(self, tmp_path):
        spec = self._spec(tmp_path, budgets=[5.0], replicates=1, policies=["naive_ucb"])
        result = run_benchmark(spec, workers=1)
        assert len(result.records) == 1
        assert (tmp_path / "out" / "results.csv").exists()
        assert (tmp_path / "out" / "summary.csv").exists()

    def test_grid_shape_and_outputs(self, tmp_path):
        spec = self._spec(tmp_path)
        result = run_benchmark(spec, workers=1)
        assert len(result.records) == 2 * 2 * 2
        header = (tmp_path / "out" / "results.csv").read_text().splitlines()[0]
        assert header == ("policy,budget,replicate,seed,cumulative_reward,tau,"
                          "plays,pulls_0,pulls_1,avg_reward_per_play")
        assert result.improvement is not None
        assert (tmp_path / "out" / "improvement.txt").exists()

    def test_serial_and_parallel_runs_are_byte_identical(self, tmp_path):
        spec_a = self._spec(tmp_path, output_dir=str(tmp_path / "serial"))
        spec_b = self._spec(tmp_path, output_dir=str(tmp_path / "parallel"))
        run_benchmark(spec_a, workers=1)
        run_benchmark(spec_b, workers=2)
        serial = (tmp_path / "serial" / "results.csv").read_bytes()
        parallel = (tmp_path / "parallel" / "results.csv").read_bytes()
        assert serial == parallel

    def test_common_random_numbers_across_policies(self, tmp_path):
        spec = self._spec(tmp_path)
        result = run_benchmark(spec, workers=1, write=False)
        seeds = {(r.policy, r.budget, r.replicate): r.seed for r in result.records}
        for budget in (4.0, 8.0):
            for rep in range(2):
                assert seeds[("roguewk_ucb", budget, rep)] == seeds[("sw_ucb", budget, rep)]

    def test_spec_validation(self, tmp_path):
        with pytest.raises(ValueError):
            self._spec(tmp_path, replicates=0)
        with pytest.raises(ValueError):
            self._spec(tmp_path, budgets=[])


def test_summary_and_improvement_formula_on_synthetic_records():
    def rec(policy, budget, replicate, reward):
        return RunRecord(policy=policy, budget=budget, replicate=replicate,
                         seed=0, cumulative_reward=reward, tau=11, plays=10,
                         per_arm_pulls=[10], avg_reward_per_play=reward / 10)

    records = [
        rec("roguewk_ucb", 10.0, 0, 100.0), rec("roguewk_ucb", 10.0, 1, 120.0),
        rec("roguewk_ucb", 20.0, 0, 200.0), rec("roguewk_ucb", 20.0, 1, 240.0),
        rec("sw_ucb", 10.0, 0, 100.0), rec("sw_ucb", 10.0, 1, 100.0),
        rec("sw_ucb", 20.0, 0, 200.0), rec("sw_ucb", 20.0, 1, 200.0),
    ]
    summary = summarize(records)
    med = {(r["policy"], r["budget"]): r["median_reward"] for r in summary}
    assert med[("roguewk_ucb", 10.0)] == 110.0
    assert med[("sw_ucb", 20.0)] == 200.0
    # mean over budgets of (median_rogue - median_sw) / median_sw
    expected = np.mean([(110.0 - 100.0) / 100.0, (220.0 - 200.0) / 200.0])
    assert relative_improvement(summary) == pytest.approx(expected, abs=1e-12)


def test_quartiles_match_numpy_percentile():
    rewards = [3.0, 9.0, 1.0, 7.0, 5.0]
    records = [RunRecord("p", 1.0, i, 0, r, 2, 1, [1], r) for i, r in enumerate(rewards)]
    row = summarize(records)[0]
    q1, med, q3 = np.percentile(rewards, [25, 50, 75])
    assert (row["q1"], row["median_reward"], row["q3"]) == (q1, med, q3)


def test_true_lp_instance_uses_means():
    config = load_config(_tiny_doc())
    inst = true_lp_instance(config)
    assert inst.costs[0, 0] == pytest.approx(0.3)  # mean of U(0.2, 0.4)
    assert inst.rate == pytest.approx(config.budget / config.T)
    assert solve(inst).value > 0


def test_regret_curve_positive_points_and_slope():
    doc = stationary_doc(
        g_values=[0.75, 0.35],
        cost_supports=[([0.9], [1.0]), ([0.01], [0.03])],
    )
    curve = regret_proxy_curve("fixed:0", doc, horizons=[60, 120], rate=0.2,
                               replicates=3, seed=0)
    assert all(p > 0 for _, p in curve.points)
    assert np.isfinite(curve.slope)


def test_resolve_workers_env_override(monkeypatch):
    monkeypatch.setenv("ROGUEWK_JOBS", "3")
    assert resolve_workers() == 3
    monkeypatch.delenv("ROGUEWK_JOBS")
    assert resolve_workers(5) == 5
    assert resolve_workers() >= 1
