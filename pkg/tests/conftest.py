import numpy as np
import pytest

from roguewk import ArmModel, ArmHistory, compute_state_domain, expected_reward, load_config
from roguewk.config import default_config_dict


@pytest.fixture(scope="session")
def tables_config():
    return load_config(default_config_dict())


def make_arm(a=0.2, b=-0.5, k=0.8, alpha=0.2, beta=0.8, x0=0.1, d=1,
             cost_low=None, cost_high=None, domain=None, arm_id=0):
    if cost_low is None:
        cost_low = np.full(d, 0.1)
    if cost_high is None:
        cost_high = np.asarray(cost_low, dtype=float)
    if domain is None:
        domain = compute_state_domain(a, b, k, x0)
    return ArmModel(id=arm_id, dyn_a=a, dyn_b=b, dyn_k=k, link_alpha=alpha,
                    link_beta=beta, cost_low=np.asarray(cost_low, dtype=float),
                    cost_high=np.asarray(cost_high, dtype=float), state_domain=domain)


def random_arm(rng, x0=None, beta_range=(-2.0, 2.0), a_range=(-0.9, 0.9)):
    """Random scalar affine-logistic arm with a domain computed from x0."""
    a = float(rng.uniform(*a_range))
    b = float(rng.uniform(-1.5, 1.0))
    k = float(rng.uniform(-1.0, 1.0))
    if x0 is None:
        x0 = float(rng.uniform(-1.0, 1.0))
    arm = make_arm(a=a, b=b, k=k, alpha=float(rng.uniform(-1, 1)),
                   beta=float(rng.uniform(*beta_range)), x0=x0)
    return arm, x0


def synth_history(arm, x0, actions, rng, d=1):
    """Roll the generative model along a fixed action log and record the
    arm's observations."""
    hist = ArmHistory()
    x = float(x0)
    for s, act in enumerate(actions):
        pulled = act == arm.id
        if pulled:
            p = expected_reward(arm, x)
            hist.append(s, int(rng.random() < p), np.full(d, 0.1))
        x = arm.dyn_a * x + arm.dyn_b * (1 if pulled else 0) + arm.dyn_k
    return hist


def stationary_doc(g_values, cost_supports, T=1000, budget=200.0, seed=0):
    """Config whose arms never move: A=B=0, K=x0=0, reward logistic(alpha)."""
    arms = []
    for g, (lo, hi) in zip(g_values, cost_supports):
        alpha = float(np.log(g / (1.0 - g)))
        arms.append({
            "A": 0.0, "B": 0.0, "K": 0.0, "alpha": alpha, "beta": 1.0,
            "cost_low": list(np.atleast_1d(lo).astype(float)),
            "cost_high": list(np.atleast_1d(hi).astype(float)),
        })
    return {"arms": arms, "x0": [0.0] * len(arms), "T": T,
            "budget": budget, "seed": seed}
