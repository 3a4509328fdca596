"""Benchmark harness: seeded episode runs, the policy x budget x replicate
grid, machine-readable outputs, and the regret proxy curve."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import derived_constants, load_config
from .env import NULL_ARM, EpisodeConfig, expected_reward, initial_state, step
from .estimation import ConfidenceConfig, EpisodeLog
from .lp import LpInstance, solve
from .policies import SwUcbConfig, default_sw_config, make_policy
from .rng import substream

WORKERS_ENV = "ROGUEWK_JOBS"


@dataclass
class ConfidenceSettings:
    """Benchmark-level knobs for the confidence machinery.  L_f and L_p
    default to the values derived from the config; xi rescales the reward
    radius and is recorded in the benchmark output."""

    xi: float = 1.0
    L_f: float | None = None
    L_p: float | None = None
    window: int | None = None
    radius_coeff: float = 2.0

    @staticmethod
    def from_dict(doc: dict | None) -> "ConfidenceSettings":
        doc = doc or {}
        return ConfidenceSettings(
            xi=float(doc.get("xi", 1.0)),
            L_f=None if doc.get("L_f") is None else float(doc["L_f"]),
            L_p=None if doc.get("L_p") is None else float(doc["L_p"]),
            window=None if doc.get("window") is None else int(doc["window"]),
            radius_coeff=float(doc.get("radius_coeff", 2.0)),
        )


def build_confidence(config: EpisodeConfig,
                     settings: ConfidenceSettings | None = None) -> ConfidenceConfig:
    settings = settings or ConfidenceSettings()
    consts = derived_constants(config)
    return ConfidenceConfig(
        L_f=settings.L_f if settings.L_f is not None else consts.lip_loglik_state,
        L_p=settings.L_p if settings.L_p is not None else consts.lip_loglik_reward,
        L_g=consts.lip_reward,
        sigma=consts.sigma,
        diam=consts.diam,
        d_x=1,
        radius_scale=settings.xi,
    )


def build_sw(config: EpisodeConfig,
             settings: ConfidenceSettings | None = None) -> SwUcbConfig:
    settings = settings or ConfidenceSettings()
    if settings.window is None:
        sw = default_sw_config(config)
        sw.radius_coeff = settings.radius_coeff
        return sw
    return SwUcbConfig(window=settings.window, radius_coeff=settings.radius_coeff)


@dataclass
class BenchmarkSpec:
    config: dict
    budgets: list[float]
    replicates: int
    policies: list[str]
    seed: int
    output_dir: str
    confidence: ConfidenceSettings = field(default_factory=ConfidenceSettings)

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if not self.budgets or any(b <= 0 for b in self.budgets):
            raise ValueError("budgets must be nonempty and positive")

    @staticmethod
    def from_dict(doc: dict) -> "BenchmarkSpec":
        return BenchmarkSpec(
            config=doc["config"],
            budgets=[float(b) for b in doc["budgets"]],
            replicates=int(doc["replicates"]),
            policies=list(doc["policies"]),
            seed=int(doc.get("seed", 0)),
            output_dir=str(doc.get("output_dir", "runs/out")),
            confidence=ConfidenceSettings.from_dict(doc.get("confidence")),
        )


@dataclass
class RunRecord:
    policy: str
    budget: float
    replicate: int
    seed: int
    cumulative_reward: float
    tau: int
    plays: int
    per_arm_pulls: list[int]
    avg_reward_per_play: float

    def sort_key(self):
        return (self.policy, self.budget, self.replicate)


@dataclass
class TraceRow:
    t: int                  # 1-based round index
    arm: int                # NULL_ARM encodes the null action
    reward: int
    cost: np.ndarray
    x_true: np.ndarray      # hidden states the round's reward was drawn from
    g_ucb: np.ndarray | None
    null_mass: float
    c_lcb: np.ndarray | None = None   # (m, d) cost bounds behind the decision
    x_hat0: np.ndarray | None = None  # MLE initial states behind the decision


def run_episode(config: EpisodeConfig, policy_name: str, seed: int,
                confidence: ConfidenceConfig | None = None,
                sw: SwUcbConfig | None = None,
                collect_trace: bool = False):
    """Run one episode to its stopping time.  Fully deterministic given the
    seed: the environment and the policy draw from independent substreams.

    Rewards, plays, and per-arm pulls are counted over rounds 1..tau-1; the
    round that first violates a budget contributes nothing.
    """
    policy = make_policy(policy_name, config,
                         confidence=confidence or build_confidence(config),
                         sw=sw)
    env_rng = substream(seed, "env")
    pol_rng = substream(seed, "policy")

    state = initial_state(config)
    log = EpisodeLog(m=config.m, d=config.d)
    trace: list[TraceRow] = []
    rewards: list[int] = []
    arms: list[int] = []

    while not state.terminated:
        t = state.t
        decision = policy.decide(log, t, pol_rng)
        x_before = state.x.copy() if collect_trace else None
        state, outcome = step(state, config, decision.chosen, env_rng)
        log.record(outcome)
        rewards.append(outcome.reward)
        arms.append(outcome.arm)
        if collect_trace:
            diag = decision.diagnostics
            trace.append(TraceRow(
                t=t + 1, arm=outcome.arm, reward=outcome.reward,
                cost=outcome.cost, x_true=x_before,
                g_ucb=None if diag is None else diag.g_ucb,
                null_mass=decision.null_mass,
                c_lcb=None if diag is None else diag.c_lcb,
                x_hat0=None if diag is None else diag.x_hat0,
            ))

    tau = state.tau
    counted = tau - 1  # number of leading rounds whose rewards count
    cumulative = float(sum(rewards[:counted]))
    pulls = [0] * config.m
    for a in arms[:counted]:
        if a != NULL_ARM:
            pulls[a] += 1
    plays = sum(pulls)
    record = RunRecord(
        policy=policy.name, budget=config.budget, replicate=0, seed=seed,
        cumulative_reward=cumulative, tau=tau, plays=plays,
        per_arm_pulls=pulls,
        avg_reward_per_play=cumulative / plays if plays else 0.0,
    )
    if collect_trace:
        return record, trace
    return record


def _run_cell(args) -> RunRecord:
    config_doc, policy_name, budget, replicate, seed, conf_doc = args
    config = load_config({**config_doc, "budget": budget, "seed": seed})
    settings = ConfidenceSettings.from_dict(conf_doc)
    record = run_episode(
        config, policy_name, seed,
        confidence=build_confidence(config, settings),
        sw=build_sw(config, settings),
    )
    record.replicate = replicate
    return record


def resolve_workers(workers: int | None = None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _confidence_doc(settings: ConfidenceSettings) -> dict:
    return {"xi": settings.xi, "L_f": settings.L_f, "L_p": settings.L_p,
            "window": settings.window, "radius_coeff": settings.radius_coeff}


@dataclass
class BenchmarkResult:
    records: list[RunRecord]
    summary: list[dict]
    improvement: float | None


def run_benchmark(spec: BenchmarkSpec, workers: int | None = None,
                  write: bool = True) -> BenchmarkResult:
    """Execute the full grid and (optionally) write results.csv,
    summary.csv, and improvement.txt under spec.output_dir.

    Replicate r of every (policy, budget) cell uses seed spec.seed + r, so
    policies face common random numbers; cells are independent and the
    record list is sorted, making output bytes independent of scheduling.
    """
    conf_doc = _confidence_doc(spec.confidence)
    cells = [
        (spec.config, policy, budget, rep, spec.seed + rep, conf_doc)
        for policy in spec.policies
        for budget in spec.budgets
        for rep in range(spec.replicates)
    ]
    nworkers = resolve_workers(workers)
    if nworkers <= 1 or len(cells) <= 1:
        records = [_run_cell(cell) for cell in cells]
    else:
        with ProcessPoolExecutor(max_workers=nworkers) as pool:
            records = list(pool.map(_run_cell, cells, chunksize=4))
    records.sort(key=RunRecord.sort_key)
    summary = summarize(records)
    improvement = relative_improvement(summary)
    if write:
        out = Path(spec.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        m = len(spec.config["arms"])
        write_results_csv(records, out / "results.csv", m)
        write_summary_csv(summary, out / "summary.csv")
        if improvement is not None:
            (out / "improvement.txt").write_text(f"{improvement!r}\n")
    return BenchmarkResult(records=records, summary=summary, improvement=improvement)


def summarize(records: list[RunRecord]) -> list[dict]:
    """Per-(policy, budget) medians and interquartile bounds."""
    groups: dict[tuple[str, float], list[RunRecord]] = {}
    for rec in records:
        groups.setdefault((rec.policy, rec.budget), []).append(rec)
    rows = []
    for (policy, budget) in sorted(groups):
        recs = groups[(policy, budget)]
        rewards = [r.cumulative_reward for r in recs]
        q1, med, q3 = np.percentile(rewards, [25, 50, 75])
        rows.append({
            "policy": policy,
            "budget": budget,
            "median_reward": float(med),
            "q1": float(q1),
            "q3": float(q3),
            "median_tau": float(np.median([r.tau for r in recs])),
            "median_plays": float(np.median([r.plays for r in recs])),
        })
    return rows


def relative_improvement(summary: list[dict],
                         target: str = "roguewk_ucb",
                         baseline: str = "sw_ucb") -> float | None:
    """Mean over budgets of (median(target) - median(baseline)) / median(baseline)."""
    med = {(row["policy"], row["budget"]): row["median_reward"] for row in summary}
    budgets = sorted({b for (p, b) in med if p == target})
    gains = []
    for b in budgets:
        if (baseline, b) not in med or med[(baseline, b)] == 0:
            continue
        gains.append((med[(target, b)] - med[(baseline, b)]) / med[(baseline, b)])
    if not gains:
        return None
    return float(np.mean(gains))


def _fmt(x) -> str:
    return repr(float(x))


def write_results_csv(records: list[RunRecord], path, m: int) -> None:
    pull_cols = ",".join(f"pulls_{i}" for i in range(m))
    lines = [f"policy,budget,replicate,seed,cumulative_reward,tau,plays,{pull_cols},avg_reward_per_play"]
    for r in records:
        pulls = ",".join(str(p) for p in r.per_arm_pulls)
        lines.append(
            f"{r.policy},{_fmt(r.budget)},{r.replicate},{r.seed},"
            f"{_fmt(r.cumulative_reward)},{r.tau},{r.plays},{pulls},{_fmt(r.avg_reward_per_play)}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_summary_csv(summary: list[dict], path) -> None:
    lines = ["policy,budget,median_reward,q1,q3,median_tau,median_plays"]
    for row in summary:
        lines.append(
            f"{row['policy']},{_fmt(row['budget'])},{_fmt(row['median_reward'])},"
            f"{_fmt(row['q1'])},{_fmt(row['q3'])},{_fmt(row['median_tau'])},{_fmt(row['median_plays'])}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def true_lp_instance(config: EpisodeConfig) -> LpInstance:
    """The allocation LP at the true initial-state rewards and true mean
    costs; oracle knowledge for evaluation only."""
    g0 = np.array([expected_reward(arm, config.x0[i]) for i, arm in enumerate(config.arms)])
    mean_costs = np.stack([(arm.cost_low + arm.cost_high) / 2.0 for arm in config.arms])
    return LpInstance(g0, mean_costs, config.rate)


def reward_upper_bound(config: EpisodeConfig) -> float:
    """Upper bound on any policy's expected cumulative reward: horizon times
    the true-parameter LP value plus the contraction-controlled drift term."""
    consts = derived_constants(config)
    lp_val = solve(true_lp_instance(config)).value
    return config.T * lp_val + consts.lip_reward * consts.diam / (1.0 - consts.contraction)


@dataclass
class RegretCurve:
    points: list[tuple[int, float]]  # (horizon, proxy regret)
    slope: float                     # fitted log-log slope


def regret_proxy_curve(policy_name: str, config_doc: dict, horizons: list[int],
                       rate: float, replicates: int, seed: int,
                       confidence: ConfidenceSettings | None = None) -> RegretCurve:
    """Proxy regret (true-parameter upper bound minus realized reward,
    averaged over replicates) across horizons with budget = rate * T, plus
    the fitted log-log slope."""
    settings = confidence or ConfidenceSettings()
    conf_doc = _confidence_doc(settings)
    points = []
    for T in horizons:
        doc = {**config_doc, "T": int(T), "budget": rate * T}
        realized = []
        for rep in range(replicates):
            # decorrelate horizons: a shared seed would replay the shorter
            # run's draws as a prefix and bias the fitted slope
            cell_seed = seed + rep + 1000003 * int(T)
            rec = _run_cell((doc, policy_name, rate * T, rep, cell_seed, conf_doc))
            realized.append(rec.cumulative_reward)
        config = load_config(doc)
        proxy = reward_upper_bound(config) - float(np.mean(realized))
        if proxy <= 0:
            raise RuntimeError(f"nonpositive proxy regret {proxy} at T={T}")
        points.append((int(T), proxy))
    logs_t = np.log([t for t, _ in points])
    logs_r = np.log([r for _, r in points])
    slope = float(np.polyfit(logs_t, logs_r, 1)[0])
    return RegretCurve(points=points, slope=slope)
