"""Command-line front end.

Subcommands:

* ``solve``       solve the dynamic program, write the value surface and the
                  extracted optimal schedule
* ``simulate``    Monte Carlo a schedule file and print/write estimator rows
* ``compare``     random-impact vs mean-impact values over an alpha1 sweep
* ``tc``          total-cost table over (alpha1, phi0) at fixed mean impact
* ``experiment``  run a whole scenario into an artifact directory

Exit codes: 0 success, 2 configuration or input validation failure,
1 runtime failure (an experiment also leaves an error manifest behind).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .closedform import compare_random_vs_baseline
from .experiments import (
    ExperimentError,
    ExperimentPlan,
    Scenario,
    comparison_rows,
    format_cell,
    run,
    total_cost_rows,
    write_csv,
)
from .montecarlo import (
    McConfig,
    evaluate_rate_analytic,
    simulate_continuous,
    simulate_discrete,
)
from .schedules import DiscreteSchedule, read_schedule_csv, write_schedule_csv
from .solver import SolveMode, SolveSpec, evaluate_discrete, extract_schedule, solve

__all__ = ["main"]


def _parse_sweep(text: str, name: str = "alpha1") -> tuple[float, ...]:
    """Parse 'alpha1=0,1,3' (or bare '0,1,3') into floats."""
    body = text
    if "=" in text:
        key, body = text.split("=", 1)
        if key.strip() != name:
            raise ConfigError(f"unknown sweep parameter {key.strip()!r}")
    try:
        values = tuple(float(v) for v in body.split(",") if v.strip() != "")
    except ValueError as exc:
        raise ConfigError(f"bad sweep list {body!r}") from exc
    if not values:
        raise ConfigError("empty sweep list")
    return values


def _parse_floats(text: str, flag: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip() != "")
    except ValueError as exc:
        raise ConfigError(f"bad {flag} list {text!r}") from exc
    if not values:
        raise ConfigError(f"empty {flag} list")
    return values


def _cmd_solve(args) -> int:
    cfg = load_config(args.config)
    spec = cfg.solve_spec(SolveMode(args.mode))
    surface = solve(spec)
    rows = []
    for j in range(surface.k + 1):
        for i, phi in enumerate(surface.grid):
            psi_star = surface.grid[surface.policy[j - 1, i]] if j >= 1 else 0.0
            rows.append((j, phi, surface.values[j, i], psi_star))
    write_csv(Path(args.out), ("j", "phi", "value", "psi_star"), rows)
    schedule = extract_schedule(surface, cfg.phi0)
    write_schedule_csv(schedule, args.schedule)
    print(f"value at phi0={cfg.phi0:g}: {surface.value(w=0.0, s=cfg.market.s0)!r}")
    return 0


def _exact_spec_for(sched: DiscreteSchedule, cfg) -> SolveSpec:
    # parameters only; the inventory grid plays no role in exact evaluation
    return SolveSpec(
        market=cfg.market,
        impact=cfg.impact,
        noise=cfg.noise,
        n=sched.n,
        k=max(sched.k, 1),
        grid_points=max(sched.k, 1),
        phi_max=max(sched.phi0, 1e-12),
    )


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    sched = read_schedule_csv(args.schedule)
    mc = McConfig(
        paths=args.paths, time_steps=args.steps, seed=args.seed,
        antithetic=args.antithetic,
    )
    if isinstance(sched, DiscreteSchedule):
        est, se = simulate_discrete(sched, cfg.market, cfg.impact, cfg.noise, mc)
        exact = evaluate_discrete(sched, _exact_spec_for(sched, cfg), s=cfg.market.s0)
        rows = [
            ("mc_discrete", est, se, mc.paths),
            ("exact_discrete", exact, 0.0, 0),
        ]
    else:
        est, se = simulate_continuous(sched, cfg.market, cfg.impact, cfg.noise, mc)
        exact = evaluate_rate_analytic(sched, cfg.market, cfg.impact, cfg.noise)
        rows = [
            ("mc_continuous", est, se, mc.paths),
            ("exact_rate_analytic", exact, 0.0, 0),
        ]
    write_csv(Path(args.out), ("estimator", "value", "std_error", "paths"), rows)
    for row in rows:
        print(",".join(format_cell(v) for v in row))
    return 0


def _cmd_compare(args) -> int:
    cfg = load_config(args.config)
    base = cfg.solve_spec()
    report = compare_random_vs_baseline(base, _parse_sweep(args.sweep))
    write_csv(Path(args.out),
              ("alpha1", "phi", "value_random", "value_baseline", "gap"),
              comparison_rows(report))
    return 0


def _cmd_tc(args) -> int:
    cfg = load_config(args.config)
    plan = ExperimentPlan.for_scenario(
        Scenario.TOTAL_COST,
        cfg,
        Path(args.out).parent,
        phi0_values=_parse_floats(args.phi0, "--phi0"),
        alpha1_values=_parse_sweep(args.sweep),
    )
    write_csv(Path(args.out), ("alpha1", "phi0", "value", "tc"), total_cost_rows(plan))
    return 0


def _cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    plan = ExperimentPlan.for_scenario(
        Scenario(args.plan), cfg, Path(args.out), seed=args.seed
    )
    out = run(plan)
    print(f"artifacts in {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levyexec",
        description="optimal execution solver and simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve the dynamic program")
    p.add_argument("--config", required=True)
    p.add_argument("--mode", choices=[m.value for m in SolveMode], default="random")
    p.add_argument("--out", default="surface.csv")
    p.add_argument("--schedule", default="schedule.csv")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("simulate", help="Monte Carlo a schedule file")
    p.add_argument("--config", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--paths", type=int, default=100000)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--antithetic", action="store_true")
    p.add_argument("--out", default="est.csv")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("compare", help="random vs mean-impact value gap")
    p.add_argument("--config", required=True)
    p.add_argument("--sweep", default="alpha1=0,1,3")
    p.add_argument("--out", default="compare.csv")
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("tc", help="total-cost table at fixed mean impact")
    p.add_argument("--config", required=True)
    p.add_argument("--phi0", default="1,10")
    p.add_argument("--sweep", default="alpha1=0,0.5,1")
    p.add_argument("--out", default="tc.csv")
    p.set_defaults(fn=_cmd_tc)

    p = sub.add_parser("experiment", help="run a whole scenario")
    p.add_argument("--plan", choices=[s.value for s in Scenario], required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ExperimentError as exc:
        print(f"experiment failed: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
