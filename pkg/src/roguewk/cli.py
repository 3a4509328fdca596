"""Command-line entry point: config validation, single-episode traces,
benchmark runs, oracle checks, and regret curves.

Diagnostics go to stderr; data goes to stdout or files, so output pipes
stay clean.  Exit code 0 means no error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, derived_constants, load_config
from .env import EpisodeConfig
from .harness import (
    BenchmarkSpec,
    ConfidenceSettings,
    build_confidence,
    build_sw,
    regret_proxy_curve,
    reward_upper_bound,
    run_benchmark,
    run_episode,
)
from .policies import exact_oracle
from .rng import substream

ALLOWED_OVERRIDES = {
    "budgets", "replicates", "policies", "seed", "output_dir",
    "config.T", "config.budget", "config.seed", "config.x0", "config.arms",
    "confidence.xi", "confidence.L_f", "confidence.L_p",
    "confidence.window", "confidence.radius_coeff",
}


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _apply_overrides(doc: dict, overrides: list[str]) -> dict:
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override '{item}' must look like key=value")
        key, raw = item.split("=", 1)
        if key not in ALLOWED_OVERRIDES:
            raise ConfigError(
                f"unknown override key '{key}'; allowed: {sorted(ALLOWED_OVERRIDES)}"
            )
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        target = doc
        parts = key.split(".")
        for part in parts[:-1]:
            target = target.setdefault(part, {})
        target[parts[-1]] = value
    return doc


def _confidence_flags(args) -> ConfidenceSettings:
    return ConfidenceSettings(
        xi=args.xi,
        window=args.window,
        radius_coeff=args.radius_coeff,
    )


def cmd_validate(args) -> int:
    config = load_config(_load_json(args.config))
    consts = derived_constants(config)
    out = sys.stdout
    print(f"arms: {config.m}, resources: {config.d}, T: {config.T}", file=out)
    print(f"budget B: {config.budget!r}, rate b = B/T: {config.rate!r}", file=out)
    print(f"contraction L_h: {consts.contraction!r}", file=out)
    for i, (dom, diam) in enumerate(zip(consts.per_arm_domain, consts.per_arm_diam)):
        print(f"arm {i}: state_domain [{dom[0]!r}, {dom[1]!r}], diam {diam!r}", file=out)
    print(f"diam(X): {consts.diam!r}", file=out)
    print(f"L_g: {consts.lip_reward!r}", file=out)
    print(f"L_f: {consts.lip_loglik_state!r}  (|beta| * max(g, 1-g) over the domain)", file=out)
    print(f"L_p: {consts.lip_loglik_reward!r}  (|beta| * diam per arm)", file=out)
    print(f"sigma: {consts.sigma!r}", file=out)
    print("ok", file=out)
    return 0


def cmd_trace(args) -> int:
    config = load_config(_load_json(args.config))
    settings = _confidence_flags(args)
    _, rows = run_episode(
        config, args.policy, args.seed,
        confidence=build_confidence(config, settings),
        sw=build_sw(config, settings),
        collect_trace=True,
    )
    m, d = config.m, config.d

    def vec(values, width) -> str:
        if values is None:
            return ",".join("nan" for _ in range(width))
        return ",".join(repr(float(v)) for v in np.ravel(values))

    cost_cols = ",".join(f"cost_{j + 1}" for j in range(d))
    x_cols = ",".join(f"x_true_{i}" for i in range(m))
    g_cols = ",".join(f"g_ucb_{i}" for i in range(m))
    header = f"t,arm,reward,{cost_cols},{x_cols},{g_cols},null_mass"
    if args.diagnostics:
        lcb_cols = ",".join(f"c_lcb_{i}_{j + 1}" for i in range(m) for j in range(d))
        hat_cols = ",".join(f"x_hat0_{i}" for i in range(m))
        header += f",{lcb_cols},{hat_cols}"
    print(header)
    for row in rows:
        line = (f"{row.t},{row.arm},{row.reward},{vec(row.cost, d)},"
                f"{vec(row.x_true, m)},{vec(row.g_ucb, m)},{repr(float(row.null_mass))}")
        if args.diagnostics:
            line += f",{vec(row.c_lcb, m * d)},{vec(row.x_hat0, m)}"
        print(line)
    return 0


def cmd_bench(args) -> int:
    doc = _apply_overrides(_load_json(args.spec), args.override)
    spec = BenchmarkSpec.from_dict(doc)
    if args.output_dir:
        spec.output_dir = args.output_dir
    ncells = len(spec.policies) * len(spec.budgets) * spec.replicates
    print(f"running {ncells} episodes "
          f"({len(spec.policies)} policies x {len(spec.budgets)} budgets x "
          f"{spec.replicates} replicates), xi={spec.confidence.xi!r}", file=sys.stderr)
    result = run_benchmark(spec, workers=args.workers)
    out = Path(spec.output_dir)
    print(f"wrote {out / 'results.csv'} ({len(result.records)} records)", file=sys.stderr)
    if result.improvement is not None:
        print(repr(result.improvement))
    else:
        print("improvement unavailable (needs both roguewk_ucb and sw_ucb)", file=sys.stderr)
    return 0


def cmd_oracle_check(args) -> int:
    rng = substream(args.seed, "oracle-check")
    print("instance,oracle_value,upper_bound,margin,ok")
    failures = 0
    for i in range(args.instances):
        config = random_oracle_instance(rng, max_m=args.max_m, max_t=args.max_t)
        value, _ = exact_oracle(config)
        bound = reward_upper_bound(config)
        ok = value <= bound + 1e-9
        failures += 0 if ok else 1
        print(f"{i},{value!r},{bound!r},{bound - value!r},{int(ok)}")
    if failures:
        print(f"{failures} instances violated the bound", file=sys.stderr)
        return 1
    return 0


def random_oracle_instance(rng: np.random.Generator, max_m: int = 3,
                           max_t: int = 8) -> EpisodeConfig:
    """Random deterministic-cost instance small enough for the oracle.

    Instances are drawn from the habituation regime the LP-based upper
    bound is valid for: nonnegative state feedback, play that depresses the
    state (B <= 0), a monotone link (beta >= 0), and a start at or above
    the rested fixed point K/(1-A).  Started below it, an arm's reward
    recovers above its initial level and the bound can genuinely fail.
    """
    m = int(rng.integers(1, max_m + 1))
    T = int(rng.integers(2, max_t + 1))
    d = int(rng.integers(1, 4))
    arms = []
    x0 = []
    for _ in range(m):
        a = float(rng.uniform(0.0, 0.8))
        b = float(rng.uniform(-2.0, 0.0))
        k = float(rng.uniform(-1.0, 1.0))
        rested = k / (1.0 - a)
        x0.append(rested + float(rng.uniform(0.0, 0.3)) * (-b) / (1.0 - a))
        cost = rng.uniform(0.0, 1.0, d)
        arms.append({
            "A": a,
            "B": b,
            "K": k,
            "alpha": float(rng.uniform(-1.0, 1.0)),
            "beta": float(rng.uniform(0.0, 2.0)),
            "cost_low": cost.tolist(),
            "cost_high": cost.tolist(),
        })
    rate = float(rng.uniform(0.05, 1.0))
    doc = {
        "arms": arms,
        "x0": x0,
        "T": T,
        "budget": rate * T,
        "seed": int(rng.integers(0, 2**31)),
    }
    return load_config(doc)


def cmd_regret_curve(args) -> int:
    doc = _load_json(args.config)
    horizons = [int(h) for h in args.horizons.split(",")]
    curve = regret_proxy_curve(
        args.policy, doc, horizons, rate=args.rate,
        replicates=args.replicates, seed=args.seed,
        confidence=_confidence_flags(args),
    )
    print("T,proxy_regret")
    for T, proxy in curve.points:
        print(f"{T},{proxy!r}")
    print(f"fitted log-log slope: {curve.slope!r}", file=sys.stderr)
    return 0


def _add_confidence_flags(parser) -> None:
    parser.add_argument("--xi", type=float, default=1.0,
                        help="reward confidence radius scale (default 1.0)")
    parser.add_argument("--window", type=int, default=None,
                        help="sliding window length (default ceil(sqrt(T)))")
    parser.add_argument("--radius-coeff", type=float, default=2.0,
                        help="sliding-window radius coefficient")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roguewk",
        description="Non-stationary bandits with knapsack constraints.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a config and print derived constants")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("trace", help="run one episode and print a per-round CSV")
    p.add_argument("config")
    p.add_argument("--policy", default="roguewk_ucb")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--diagnostics", action="store_true",
                   help="append cost LCB and MLE initial-state columns")
    _add_confidence_flags(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("bench", help="run the benchmark grid and write CSV outputs")
    p.add_argument("spec")
    p.add_argument("-o", "--override", action="append", default=[],
                   metavar="KEY=VALUE", help="dotted-path override, e.g. replicates=2")
    p.add_argument("--workers", type=int, default=None,
                   help="process count (default: $ROGUEWK_JOBS or cpu count)")
    p.add_argument("--output-dir", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle-check",
                       help="verify the LP-based upper bound against the exact oracle")
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-t", type=int, default=8, dest="max_t")
    p.add_argument("--max-m", type=int, default=3, dest="max_m")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("regret-curve", help="proxy regret across horizons")
    p.add_argument("config")
    p.add_argument("--policy", default="roguewk_ucb")
    p.add_argument("--horizons", default="250,500,1000,2000")
    p.add_argument("--rate", type=float, default=0.2)
    p.add_argument("--replicates", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    _add_confidence_flags(p)
    p.set_defaults(func=cmd_regret_curve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        print(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}",
              file=sys.stderr)
        return 1
    except (ConfigError, ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def console_entry() -> None:
    sys.exit(main())
