"""Episode config serialization, validation, and derived constants."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .env import ArmModel, EpisodeConfig, compute_state_domain, logistic

ARM_KEYS = ("A", "B", "K", "alpha", "beta", "cost_low", "cost_high")


class ConfigError(ValueError):
    """Invalid episode config; message lists every violation found."""


def load_config(source) -> EpisodeConfig:
    """Build a validated EpisodeConfig from a dict, JSON string, or path."""
    doc = _read_document(source)
    errors: list[str] = []

    for key in ("arms", "x0", "T", "budget", "seed"):
        if key not in doc:
            errors.append(f"missing required key '{key}'")
    if errors:
        raise ConfigError("; ".join(errors))

    raw_arms = doc["arms"]
    x0 = [float(v) for v in doc["x0"]]
    if len(x0) != len(raw_arms):
        errors.append(f"x0 has {len(x0)} entries for {len(raw_arms)} arms")

    T = int(doc["T"])
    if T < 1:
        errors.append(f"T must be >= 1, got {T}")
    budget = float(doc["budget"])
    if budget <= 0:
        errors.append(f"budget must be positive, got {budget}")

    d = None
    arms: list[ArmModel] = []
    for i, raw in enumerate(raw_arms):
        missing = [k for k in ARM_KEYS if k not in raw]
        if missing:
            errors.append(f"arm {i}: missing keys {missing}")
            continue
        a, b, k = float(raw["A"]), float(raw["B"]), float(raw["K"])
        low = np.asarray(raw["cost_low"], dtype=float)
        high = np.asarray(raw["cost_high"], dtype=float)
        if abs(a) >= 1.0:
            errors.append(f"arm {i}: Assumption 5 violated, |A| = {abs(a)} >= 1")
            continue
        if low.shape != high.shape or low.ndim != 1:
            errors.append(f"arm {i}: cost_low/cost_high must be equal-length vectors")
            continue
        if d is None:
            d = len(low)
        elif len(low) != d:
            errors.append(f"arm {i}: expected {d} resources, got {len(low)}")
            continue
        if np.any(low < 0) or np.any(high > 1) or np.any(low > high):
            errors.append(
                f"arm {i}: cost supports must satisfy 0 <= low <= high <= 1, "
                f"got low={low.tolist()} high={high.tolist()}"
            )
            continue
        xi = x0[i] if i < len(x0) else 0.0
        domain = compute_state_domain(a, b, k, xi)
        arms.append(ArmModel(
            id=i, dyn_a=a, dyn_b=b, dyn_k=k,
            link_alpha=float(raw["alpha"]), link_beta=float(raw["beta"]),
            cost_low=low, cost_high=high, state_domain=domain,
        ))

    if errors:
        raise ConfigError("; ".join(errors))
    return EpisodeConfig(arms=arms, x0=np.asarray(x0), T=T, budget=budget,
                         d=d or 0, seed=int(doc["seed"]))


def config_to_dict(config: EpisodeConfig) -> dict:
    """Inverse of load_config (state domains are recomputed on load)."""
    return {
        "arms": [
            {
                "A": arm.dyn_a, "B": arm.dyn_b, "K": arm.dyn_k,
                "alpha": arm.link_alpha, "beta": arm.link_beta,
                "cost_low": arm.cost_low.tolist(),
                "cost_high": arm.cost_high.tolist(),
            }
            for arm in config.arms
        ],
        "x0": config.x0.tolist(),
        "T": config.T,
        "budget": config.budget,
        "seed": config.seed,
    }


def _read_document(source) -> dict:
    if isinstance(source, dict):
        return source
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith("{"):
        with open(source) as fh:
            return json.load(fh)
    return json.loads(source)


def default_config_dict() -> dict:
    """The shipped three-arm experiment config (dynamics and uniform cost
    supports of the benchmark arms)."""
    text = resources.files("roguewk.data").joinpath("experiment_arms.json").read_text()
    return json.loads(text)


def default_benchmark_dict() -> dict:
    """The shipped benchmark grid spec (budgets 10..300, 10 replicates)."""
    text = resources.files("roguewk.data").joinpath("benchmark.json").read_text()
    return json.loads(text)


@dataclass
class DerivedConstants:
    """Config-level constants feeding confidence radii and regret bounds.

    contraction: largest |A| over arms (must be < 1).
    diam: largest state-domain width over arms.
    lip_reward: bound on |g'| over arms (|beta| / 4 for the logistic link).
    lip_loglik_state: bound on the log-likelihood derivative in the state,
        |beta| * max(g, 1 - g) over each arm's domain.
    lip_loglik_reward: bound on the log-likelihood-ratio derivative in the
        reward, |beta| * diam per arm.
    sigma: sub-Gaussian parameter of the 0/1 rewards (1/2).
    """

    contraction: float
    diam: float
    per_arm_diam: list[float]
    per_arm_domain: list[tuple[float, float]]
    lip_reward: float
    lip_loglik_state: float
    lip_loglik_reward: float
    sigma: float
    rate: float


def derived_constants(config: EpisodeConfig) -> DerivedConstants:
    diams = [arm.diam for arm in config.arms]
    l_f = 0.0
    l_p = 0.0
    for arm in config.arms:
        lo, hi = arm.state_domain
        g_lo = logistic(arm.link_alpha + arm.link_beta * lo)
        g_hi = logistic(arm.link_alpha + arm.link_beta * hi)
        g_min, g_max = min(g_lo, g_hi), max(g_lo, g_hi)
        l_f = max(l_f, abs(arm.link_beta) * max(g_max, 1.0 - g_min))
        l_p = max(l_p, abs(arm.link_beta) * arm.diam)
    return DerivedConstants(
        contraction=max(abs(arm.dyn_a) for arm in config.arms),
        diam=max(diams),
        per_arm_diam=diams,
        per_arm_domain=[arm.state_domain for arm in config.arms],
        lip_reward=max(abs(arm.link_beta) for arm in config.arms) / 4.0,
        lip_loglik_state=l_f,
        lip_loglik_reward=l_p,
        sigma=0.5,
        rate=config.rate,
    )
