"""Generative model: arms with habituation/recovery dynamics, Bernoulli
rewards through a logistic link, uniform resource costs, and budget-based
episode termination."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NULL_ARM = -1

# Slack for floating-point containment checks against state_domain.
DOMAIN_TOL = 1e-9


class EpisodeOver(RuntimeError):
    """Raised when stepping an episode that has already terminated."""


class StateDomainError(ValueError):
    """A state left its arm's invariant domain; indicates a config bug."""


def logistic(z):
    """Numerically stable logistic function, scalar or array."""
    z = np.asarray(z, dtype=float)
    e = np.exp(-np.abs(z))
    out = np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return float(out) if out.ndim == 0 else out


def compute_state_domain(dyn_a: float, dyn_b: float, dyn_k: float, x0: float,
                         inflate: float = 0.005) -> tuple[float, float]:
    """Closed interval containing every state reachable from x0.

    The two per-step affine maps (pull / no pull) share slope ``dyn_a`` with
    |dyn_a| < 1, so the reachable set is bounded by the envelope of the
    interval recursion started at x0.  For dyn_a >= 0 this reduces to the
    hull of {x0, dyn_k/(1-dyn_a), (dyn_k+dyn_b)/(1-dyn_a)}; for dyn_a < 0 the
    bounds of the two-step (slope dyn_a**2) recursion are needed as well.
    The result is inflated by ``inflate`` of its width on each side so the
    interval is closed under the dynamics with margin and never requires
    clipping.
    """
    a = float(dyn_a)
    if abs(a) >= 1.0:
        raise ValueError(f"state feedback coefficient must satisfy |A| < 1, got {a}")
    c_lo = min(dyn_k, dyn_k + dyn_b)
    c_hi = max(dyn_k, dyn_k + dyn_b)
    if a < 0:
        att_hi = (c_hi + a * c_lo) / (1.0 - a * a)
        att_lo = (c_lo + a * c_hi) / (1.0 - a * a)
    else:
        att_hi = c_hi / (1.0 - a)
        att_lo = c_lo / (1.0 - a)
    hi = max(x0, a * x0 + c_hi, att_hi)
    lo = min(x0, a * x0 + c_lo, att_lo)
    width = hi - lo
    pad = inflate * width if width > 0 else inflate
    return (lo - pad, hi + pad)


@dataclass(eq=False)
class ArmModel:
    """One arm's dynamics, reward link, and cost distribution.

    State transitions are affine: x' = dyn_a * x + dyn_b * pulled + dyn_k,
    with |dyn_a| < 1 so the dynamics contract.  The expected reward is
    logistic(link_alpha + link_beta * x) and each of the d resource costs is
    drawn uniformly from [cost_low[j], cost_high[j]] within [0, 1].
    """

    id: int
    dyn_a: float
    dyn_b: float
    dyn_k: float
    link_alpha: float
    link_beta: float
    cost_low: np.ndarray
    cost_high: np.ndarray
    state_domain: tuple[float, float]

    def __post_init__(self):
        self.cost_low = np.asarray(self.cost_low, dtype=float)
        self.cost_high = np.asarray(self.cost_high, dtype=float)

    @property
    def diam(self) -> float:
        return self.state_domain[1] - self.state_domain[0]

    def contains(self, x: float, tol: float = DOMAIN_TOL) -> bool:
        lo, hi = self.state_domain
        return lo - tol <= x <= hi + tol


@dataclass(eq=False)
class EpisodeConfig:
    """Full description of one episode: arms, initial states, horizon,
    shared per-resource budget, and base seed."""

    arms: list[ArmModel]
    x0: np.ndarray
    T: int
    budget: float
    d: int
    seed: int

    def __post_init__(self):
        self.x0 = np.asarray(self.x0, dtype=float)

    @property
    def m(self) -> int:
        return len(self.arms)

    @property
    def rate(self) -> float:
        """Per-round budget rate b = budget / T."""
        return self.budget / self.T


@dataclass(eq=False)
class BanditState:
    """Mutable per-episode state, confined to a single episode runner."""

    t: int
    x: np.ndarray
    spent: np.ndarray
    terminated: bool = False
    tau: int | None = None


@dataclass(eq=False)
class StepOutcome:
    """What one round revealed: pulled arm (NULL_ARM for none), its 0/1
    reward, and its realized cost vector (zeros for the null action)."""

    arm: int
    reward: int
    cost: np.ndarray


def transition(arm: ArmModel, x: float, pulled: int) -> float:
    """Advance one arm's state by a single round."""
    if not arm.contains(x):
        raise StateDomainError(
            f"arm {arm.id}: state {x} outside domain {arm.state_domain}"
        )
    return arm.dyn_a * x + arm.dyn_b * (1 if pulled else 0) + arm.dyn_k


def expected_reward(arm: ArmModel, x: float) -> float:
    """Expected reward of the arm at state x (logistic link)."""
    return logistic(arm.link_alpha + arm.link_beta * x)


def initial_state(config: EpisodeConfig) -> BanditState:
    return BanditState(
        t=0,
        x=config.x0.copy(),
        spent=np.zeros(config.d),
        terminated=config.T < 1,
        tau=None,
    )


def step(state: BanditState, config: EpisodeConfig, arm_choice: int,
         rng: np.random.Generator) -> tuple[BanditState, StepOutcome]:
    """Play one round: draw reward and cost for the chosen arm (if any),
    transition every arm (unplayed arms recover), update budgets, and flag
    termination at the earliest violation or horizon end.
    """
    if state.terminated:
        raise EpisodeOver("cannot step a terminated episode")

    if arm_choice == NULL_ARM:
        reward = 0
        cost = np.zeros(config.d)
    else:
        arm = config.arms[arm_choice]
        p = expected_reward(arm, state.x[arm_choice])
        reward = int(rng.random() < p)
        cost = rng.uniform(arm.cost_low, arm.cost_high)

    new_x = np.empty_like(state.x)
    for i, arm in enumerate(config.arms):
        new_x[i] = transition(arm, state.x[i], pulled=(i == arm_choice))

    spent = state.spent + cost
    t = state.t + 1
    violated = bool(np.any(spent > config.budget))
    if violated:
        tau = t
        terminated = True
    elif t >= config.T:
        tau = config.T + 1
        terminated = True
    else:
        tau = None
        terminated = False

    new_state = BanditState(t=t, x=new_x, spent=spent, terminated=terminated, tau=tau)
    return new_state, StepOutcome(arm=arm_choice, reward=reward, cost=cost)
