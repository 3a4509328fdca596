"""Non-stationary bandits with knapsack constraints.

Arms carry a hidden state with known contractive dynamics: playing an arm
depresses its future rewards (habituation) and resting it restores them
(recovery), while every pull consumes budgeted resources with initially
unknown cost distributions.  The package provides the generative
environment, confidence-bound estimation, a small allocation-LP solver,
policies and baselines, an exact small-instance oracle, and a benchmark
harness with a CLI.
"""

from .config import ConfigError, config_to_dict, default_benchmark_dict, default_config_dict, derived_constants, load_config
from .env import (
    ArmModel,
    BanditState,
    EpisodeConfig,
    EpisodeOver,
    NULL_ARM,
    StateDomainError,
    StepOutcome,
    compute_state_domain,
    expected_reward,
    initial_state,
    step,
    transition,
)
from .estimation import (
    ArmEstimator,
    ArmHistory,
    ConfidenceBundle,
    ConfidenceConfig,
    EpisodeLog,
    confidence_radius,
    cost_lcb,
    mle_initial_state,
    reward_ucb,
    trajectory_kl,
)
from .harness import (
    BenchmarkSpec,
    ConfidenceSettings,
    RegretCurve,
    RunRecord,
    build_confidence,
    build_sw,
    regret_proxy_curve,
    relative_improvement,
    reward_upper_bound,
    run_benchmark,
    run_episode,
    summarize,
    true_lp_instance,
)
from .lp import LpInstance, LpSolution, solve, solve_by_vertex_enumeration
from .policies import (
    FixedArmPolicy,
    NaiveUcbPolicy,
    PolicyDecision,
    RogueWkUcbPolicy,
    SwUcbConfig,
    SwUcbPolicy,
    exact_oracle,
    make_policy,
)
from .rng import substream

__version__ = "0.1.0"
