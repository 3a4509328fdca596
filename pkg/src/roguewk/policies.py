"""Arm-selection policies and the small-instance exact oracle.

All policies share the same protocol: after a round-robin initialization
(one pull per arm), ``decide`` maps the episode log to a distribution over
arms plus a null mass and samples the action from it.  Policy instances are
confined to a single episode.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .env import EpisodeConfig, NULL_ARM, expected_reward, logistic
from .estimation import (
    ArmEstimator,
    ConfidenceBundle,
    ConfidenceConfig,
    EpisodeLog,
    confidence_radius,
    hoeffding_radius,
)
from .lp import LpInstance, LpSolution, solve

POLICY_NAMES = ("roguewk_ucb", "naive_ucb", "sw_ucb")


@dataclass(eq=False)
class PolicyDecision:
    """One round's decision: the sampling distribution actually used, the
    sampled arm (NULL_ARM for the null action), and optional diagnostics."""

    chosen: int
    pi: np.ndarray
    null_mass: float
    diagnostics: ConfidenceBundle | None = None
    lp_value: float | None = None

    @staticmethod
    def point_mass(arm: int, m: int) -> "PolicyDecision":
        pi = np.zeros(m)
        pi[arm] = 1.0
        return PolicyDecision(chosen=arm, pi=pi, null_mass=0.0)


@dataclass
class SwUcbConfig:
    """Sliding-window baseline hyperparameters (window length in rounds and
    the coefficient inside the confidence radius)."""

    window: int
    radius_coeff: float = 2.0


def sample_decision(sol: LpSolution, rng: np.random.Generator) -> int:
    """Sample an arm index from an LP solution; zero-probability arms are
    never selected and leftover mass maps to the null action."""
    u = rng.random()
    acc = 0.0
    last_positive = None
    for i, p in enumerate(sol.pi):
        if p > 0.0:
            last_positive = i
            acc += p
            if u < acc:
                return i
    if sol.null_mass > 0.0:
        return NULL_ARM
    return last_positive if last_positive is not None else NULL_ARM


class Policy:
    """Base protocol: decide(log, t, rng) with t == log.t."""

    name = "policy"

    def decide(self, log: EpisodeLog, t: int, rng: np.random.Generator) -> PolicyDecision:
        raise NotImplementedError


class RogueWkUcbPolicy(Policy):
    """Confidence-bound policy for habituating arms under knapsacks.

    Each round it computes per-arm reward UCBs from the trajectory-KL
    confidence set around the MLE initial state, cost LCBs from Hoeffding
    bounds, solves the single-round allocation LP on them, and samples the
    arm from the LP solution.
    """

    name = "roguewk_ucb"

    def __init__(self, config: EpisodeConfig, confidence: ConfidenceConfig):
        self.config = config
        self.confidence = confidence
        self._reset()

    def _reset(self) -> None:
        self._estimators = [ArmEstimator(arm) for arm in self.config.arms]
        self._pull_ptr = [0] * self.config.m
        self._synced = 0
        self._log_ref: EpisodeLog | None = None

    def _sync(self, log: EpisodeLog) -> None:
        # incremental caches are only valid for one append-only log
        if self._log_ref is not log or log.t < self._synced:
            self._reset()
            self._log_ref = log
        for s in range(self._synced, log.t):
            a = log.actions[s]
            for i, est in enumerate(self._estimators):
                if a == i:
                    hist = log.histories[i]
                    k = self._pull_ptr[i]
                    est.record(hist.rewards[k], hist.costs[k])
                    self._pull_ptr[i] = k + 1
                est.advance(a == i)
        self._synced = log.t

    def bundle(self, log: EpisodeLog) -> ConfidenceBundle:
        self._sync(log)
        m, d, T = self.config.m, self.config.d, self.config.T
        g_ucb = np.empty(m)
        c_lcb = np.empty((m, d))
        x_hat = np.empty(m)
        for i, est in enumerate(self._estimators):
            radius = confidence_radius(est.n, m, T, self.confidence)
            g_ucb[i] = est.reward_ucb(radius)
            c_lcb[i] = est.cost_mean() - hoeffding_radius(est.n, m, d, T)
            x_hat[i] = est.mle()
        return ConfidenceBundle(g_ucb=g_ucb, c_lcb=c_lcb, x_hat0=x_hat)

    def decide(self, log, t, rng):
        if t < self.config.m:
            self._sync(log)
            return PolicyDecision.point_mass(t, self.config.m)
        bundle = self.bundle(log)
        sol = solve(LpInstance(bundle.g_ucb, bundle.c_lcb, self.config.rate))
        chosen = sample_decision(sol, rng)
        return PolicyDecision(chosen=chosen, pi=sol.pi, null_mass=sol.null_mass,
                              diagnostics=bundle, lp_value=sol.value)


class NaiveUcbPolicy(Policy):
    """Classic index policy on running means; blind to both the state
    dynamics and the resource costs."""

    name = "naive_ucb"

    def __init__(self, config: EpisodeConfig):
        self.config = config

    def decide(self, log, t, rng):
        m = self.config.m
        if t < m:
            return PolicyDecision.point_mass(t, m)
        index = np.empty(m)
        for i, hist in enumerate(log.histories):
            mean = float(np.mean(hist.rewards))
            index[i] = mean + math.sqrt(2.0 * math.log(max(t, 1)) / hist.n)
        chosen = int(np.argmax(index))  # ties break toward the lowest arm id
        return PolicyDecision.point_mass(chosen, m)


class SwUcbPolicy(Policy):
    """Sliding-window baseline: reward UCBs and cost LCBs from the last
    ``window`` rounds only, fed through the same allocation LP."""

    name = "sw_ucb"

    def __init__(self, config: EpisodeConfig, sw: SwUcbConfig):
        if not 1 <= sw.window <= config.T:
            raise ValueError(f"window must be in [1, T], got {sw.window}")
        self.config = config
        self.sw = sw

    def decide(self, log, t, rng):
        m, d, T = self.config.m, self.config.d, self.config.T
        if t < m:
            return PolicyDecision.point_mass(t, m)
        g_ucb = np.empty(m)
        c_lcb = np.empty((m, d))
        for i, hist in enumerate(log.histories):
            start = bisect.bisect_left(hist.pull_times, t - self.sw.window)
            n_w = hist.n - start
            if n_w == 0:
                g_ucb[i] = 1.0  # optimistic defaults for arms unseen in the window
                c_lcb[i] = 0.0
                continue
            radius = math.sqrt(self.sw.radius_coeff * math.log(T) / n_w)
            g_ucb[i] = min(1.0, float(np.mean(hist.rewards[start:])) + radius)
            c_lcb[i] = np.maximum(0.0, np.mean(hist.costs[start:], axis=0) - radius)
        sol = solve(LpInstance(g_ucb, c_lcb, self.config.rate))
        chosen = sample_decision(sol, rng)
        bundle = ConfidenceBundle(g_ucb=g_ucb, c_lcb=c_lcb, x_hat0=np.full(m, np.nan))
        return PolicyDecision(chosen=chosen, pi=sol.pi, null_mass=sol.null_mass,
                              diagnostics=bundle, lp_value=sol.value)


class FixedArmPolicy(Policy):
    """Diagnostic anchor that pulls one arm every round."""

    def __init__(self, config: EpisodeConfig, arm: int):
        self.config = config
        self.arm = arm
        self.name = f"fixed:{arm}"

    def decide(self, log, t, rng):
        return PolicyDecision.point_mass(self.arm, self.config.m)


def default_sw_config(config: EpisodeConfig) -> SwUcbConfig:
    return SwUcbConfig(window=max(1, math.ceil(math.sqrt(config.T))), radius_coeff=2.0)


def make_policy(name: str, config: EpisodeConfig,
                confidence: ConfidenceConfig | None = None,
                sw: SwUcbConfig | None = None) -> Policy:
    """Instantiate a policy by its config-file name."""
    if name == "roguewk_ucb":
        if confidence is None:
            raise ValueError("roguewk_ucb requires a ConfidenceConfig")
        return RogueWkUcbPolicy(config, confidence)
    if name == "naive_ucb":
        return NaiveUcbPolicy(config)
    if name == "sw_ucb":
        return SwUcbPolicy(config, sw or default_sw_config(config))
    if name == "fixed_worst":
        # worst = least initial reward per unit of the arm's most expensive
        # resource, the quantity that drives value under a binding budget
        def efficiency(i: int) -> float:
            arm = config.arms[i]
            dearest = float(np.max((arm.cost_low + arm.cost_high) / 2.0))
            return expected_reward(arm, config.x0[i]) / max(dearest, 1e-9)

        return FixedArmPolicy(config, min(range(config.m), key=efficiency))
    if name.startswith("fixed:"):
        return FixedArmPolicy(config, int(name.split(":", 1)[1]))
    raise ValueError(f"unknown policy '{name}'; expected one of {POLICY_NAMES}")


_ORACLE_MAX_T = 12
_ORACLE_MAX_M = 3


def exact_oracle(config: EpisodeConfig) -> tuple[float, list[int]]:
    """Exhaustive optimum of the expected-reward objective on a tiny
    deterministic-cost instance.

    Enumerates all (m+1)^T action sequences (including the null action)
    level by level, pruning prefixes that already violate a budget: with the
    null action available, any violating sequence is dominated by playing
    null from the violation onward, so pruning preserves exactness.
    """
    m, d, T = config.m, config.d, config.T
    if T > _ORACLE_MAX_T or m > _ORACLE_MAX_M:
        raise ValueError(f"exact oracle limited to T <= {_ORACLE_MAX_T}, m <= {_ORACLE_MAX_M}")
    for arm in config.arms:
        if not np.allclose(arm.cost_low, arm.cost_high):
            raise ValueError("exact oracle requires deterministic costs")

    dyn_a = np.array([arm.dyn_a for arm in config.arms])
    dyn_b = np.array([arm.dyn_b for arm in config.arms])
    dyn_k = np.array([arm.dyn_k for arm in config.arms])
    alpha = np.array([arm.link_alpha for arm in config.arms])
    beta = np.array([arm.link_beta for arm in config.arms])
    costs = np.stack([arm.cost_low for arm in config.arms])  # (m, d)
    base = m + 1

    xs = config.x0[None, :].astype(float)
    spent = np.zeros((1, d))
    acc = np.zeros(1)
    codes = np.zeros(1, dtype=np.int64)

    for _ in range(T):
        drift = xs * dyn_a + dyn_k
        next_xs, next_spent, next_acc, next_codes = [], [], [], []
        for a in range(m):
            new_spent = spent + costs[a]
            ok = np.all(new_spent <= config.budget, axis=1)
            if not np.any(ok):
                continue
            moved = drift[ok].copy()
            moved[:, a] += dyn_b[a]
            next_xs.append(moved)
            next_spent.append(new_spent[ok])
            next_acc.append(acc[ok] + logistic(alpha[a] + beta[a] * xs[ok, a]))
            next_codes.append(codes[ok] * base + (a + 1))
        next_xs.append(drift)
        next_spent.append(spent)
        next_acc.append(acc)
        next_codes.append(codes * base)
        xs = np.concatenate(next_xs)
        spent = np.concatenate(next_spent)
        acc = np.concatenate(next_acc)
        codes = np.concatenate(next_codes)

    best = int(np.argmax(acc))
    code = int(codes[best])
    actions = []
    for _ in range(T):
        digit = code % base
        actions.append(NULL_ARM if digit == 0 else digit - 1)
        code //= base
    actions.reverse()
    return float(acc[best]), actions
