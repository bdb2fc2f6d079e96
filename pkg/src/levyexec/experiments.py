"""Experiment orchestration: solve, extract, tabulate, and write artifacts.

Each scenario resolves its parameter sweep (overridable paper defaults),
runs the required solves, and writes CSVs plus a ``manifest.json`` into its
own subdirectory of the output root. Reruns with the same config and seed
produce byte-identical files: floats are printed at full precision, the
manifest is sorted, and nothing records wall-clock state.
"""

from __future__ import annotations

import hashlib
import json
import platform
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

import numba
import numpy as np
import scipy

from . import __version__
from .closedform import (
    compare_random_vs_baseline,
    fixed_gamma_tilde_params,
    loglinear_value,
    total_mi_cost,
)
from .config import ProblemConfig
from .models import ImpactKind, NoiseModel, validate_conditions
from .solver import (
    SolveMode,
    SolveSpec,
    convergence_sweep,
    default_grid_points,
    extract_schedule,
    solve,
)

__all__ = [
    "Scenario",
    "ExperimentPlan",
    "ExperimentError",
    "run",
    "comparison_rows",
    "total_cost_rows",
    "format_cell",
    "write_csv",
]

_FMT = "%.17g"


class Scenario(str, Enum):
    FIXED_GAMMA = "fixed-gamma"
    FIXED_GAMMA_TILDE = "fixed-gamma-tilde"
    CONVERGE = "converge"
    COMPARE = "compare"
    TOTAL_COST = "tc"


class ExperimentError(RuntimeError):
    """A scenario aborted; an error manifest has been written."""


@dataclass(frozen=True)
class ExperimentPlan:
    scenario: Scenario
    config: ProblemConfig
    out_dir: Path
    seed: int = 0
    phi0_values: tuple[float, ...] = ()
    alpha1_values: tuple[float, ...] = ()
    n_values: tuple[int, ...] = ()

    @classmethod
    def for_scenario(
        cls,
        scenario: Scenario,
        config: ProblemConfig,
        out_dir: str | Path,
        seed: int = 0,
        phi0_values: Sequence[float] | None = None,
        alpha1_values: Sequence[float] | None = None,
        n_values: Sequence[int] | None = None,
    ) -> "ExperimentPlan":
        """Fill in the paper-default sweeps for anything not overridden."""
        if phi0_values is None:
            if scenario in (Scenario.FIXED_GAMMA, Scenario.FIXED_GAMMA_TILDE):
                phi0_values = (1.0, 10.0, 100.0)
            elif scenario is Scenario.TOTAL_COST:
                phi0_values = (1.0, 10.0)
            else:
                phi0_values = (config.phi0,)
        if alpha1_values is None:
            if scenario in (Scenario.FIXED_GAMMA_TILDE, Scenario.TOTAL_COST):
                alpha1_values = (0.0, 0.5, 1.0)
            else:
                alpha1_values = (0.0, 1.0, 3.0)
        if n_values is None:
            if config.impact.kind is ImpactKind.QUADRATIC:
                n_values = (50, 100, 200, 400, 800)
            else:
                n_values = (50, 100, 200, 400)
        return cls(
            scenario=scenario,
            config=config,
            out_dir=Path(out_dir),
            seed=seed,
            phi0_values=tuple(float(p) for p in phi0_values),
            alpha1_values=tuple(float(a) for a in alpha1_values),
            n_values=tuple(int(n) for n in n_values),
        )


def format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _FMT % float(value)
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(format_cell(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _grid_points_for(config: ProblemConfig, phi0: float) -> int:
    if config.grid_points is not None:
        return config.grid_points
    return default_grid_points(phi0)


def _noise_for(plan: ExperimentPlan, alpha1: float) -> NoiseModel:
    """Noise model for one sweep point, under the scenario's convention."""
    cfg = plan.config.noise
    if plan.scenario in (Scenario.FIXED_GAMMA_TILDE, Scenario.TOTAL_COST):
        if any(a > 0 for a in plan.alpha1_values) and cfg.jump_variance == 0.0:
            raise ValueError(
                "fixed-gamma-tilde sweeps need a config noise with jumps: "
                "gamma_tilde and the jump variance are read from [noise]"
            )
        gamma, beta1 = fixed_gamma_tilde_params(
            cfg.gamma_tilde, cfg.jump_variance, alpha1
        )
        return NoiseModel(gamma, alpha1 if beta1 > 0 else 0.0, beta1)
    # fixed-gamma convention: keep gamma and beta1, move only alpha1
    return NoiseModel(cfg.gamma, alpha1, cfg.beta1)


def _strategy_rows(schedule, n: int):
    """Curve rows (r, zeta, phi): rate over [r, r+1/n), holdings at r."""
    phi = schedule.phi0
    rows = []
    for l, psi in enumerate(schedule.blocks):
        rows.append((l / n, n * psi, phi))
        phi -= psi
    rows.append((len(schedule.blocks) / n, 0.0, phi))
    return rows


def _solve_point(plan: ExperimentPlan, phi0: float, noise: NoiseModel):
    cfg = plan.config
    spec = SolveSpec.from_problem(
        cfg.market, cfg.impact, noise, cfg.t, cfg.n,
        phi0, _grid_points_for(cfg, phi0),
    )
    surface = solve(spec)
    schedule = extract_schedule(surface, phi0)
    return surface, schedule


def _run_strategy_scenario(plan: ExperimentPlan, out: Path) -> list[str]:
    files = []
    value_rows = []
    for phi0 in plan.phi0_values:
        for a1 in plan.alpha1_values:
            noise = _noise_for(plan, a1)
            surface, schedule = _solve_point(plan, phi0, noise)
            name = f"strategy_phi{phi0:g}_alpha{a1:g}.csv"
            write_csv(out / name, ("r", "zeta", "phi"),
                       _strategy_rows(schedule, plan.config.n))
            files.append(name)
            value_rows.append((phi0, a1, surface.value(w=0.0, s=plan.config.market.s0)))
    write_csv(out / "values.csv", ("phi0", "alpha1", "value"), value_rows)
    files.append("values.csv")
    return files


def _run_converge(plan: ExperimentPlan, out: Path) -> list[str]:
    cfg = plan.config
    spec = cfg.solve_spec()
    if cfg.impact.kind is ImpactKind.LINEAR:
        closed = loglinear_value(0.0, cfg.phi0, cfg.market.s0,
                                 cfg.noise.gamma, cfg.impact.alpha0)
        rows = convergence_sweep(spec, plan.n_values, closed_form=closed)
    else:
        # refine the inventory grid with n so the rate grid step n*phi0/M stays put
        rows = convergence_sweep(
            spec, plan.n_values, grid_points_for_n=lambda n: 2 * n
        )
    write_csv(
        out / "convergence.csv",
        ("n", "value", "gap_prev", "gap_closed"),
        ((r.n, r.value, r.gap_prev, r.gap_closed) for r in rows),
    )
    return ["convergence.csv"]


def comparison_rows(report) -> list[tuple]:
    """Flatten a ComparisonReport into (alpha1, phi, random, baseline, gap) rows."""
    rows = []
    for i, a1 in enumerate(report.alpha1_values):
        for j, phi in enumerate(report.phi_values):
            rows.append((a1, phi, report.value_random[i, j],
                         report.value_baseline[i, j], report.gap[i, j]))
    return rows


def _run_compare(plan: ExperimentPlan, out: Path) -> list[str]:
    base = plan.config.solve_spec()
    report = compare_random_vs_baseline(base, plan.alpha1_values, plan.phi0_values)
    write_csv(out / "compare.csv",
              ("alpha1", "phi", "value_random", "value_baseline", "gap"),
              comparison_rows(report))
    return ["compare.csv"]


def total_cost_rows(plan: ExperimentPlan) -> list[tuple]:
    """(alpha1, phi0, value, tc) rows for the fixed-mean-impact cost table."""
    cfg = plan.config
    rows = []
    for a1 in plan.alpha1_values:
        noise = _noise_for(plan, a1)
        for phi0 in plan.phi0_values:
            surface, _ = _solve_point(plan, phi0, noise)
            value = surface.value(w=0.0, s=cfg.market.s0)
            rows.append((a1, phi0, value, total_mi_cost(value, phi0, cfg.market.s0)))
    return rows


def _run_total_cost(plan: ExperimentPlan, out: Path) -> list[str]:
    write_csv(out / "tc.csv", ("alpha1", "phi0", "value", "tc"), total_cost_rows(plan))
    return ["tc.csv"]


def _condition_checks(plan: ExperimentPlan) -> list[dict]:
    checks = []
    for a1 in plan.alpha1_values:
        noise = _noise_for(plan, a1)
        report = validate_conditions(
            plan.config.market, plan.config.impact, noise, plan.config.n
        )
        checks.append(
            {
                "alpha1": a1,
                "gamma": noise.gamma,
                "beta1": noise.beta1,
                "d_ok": bool(report.d_ok),
                "d_lhs": report.d_lhs,
                "d_rhs": report.d_rhs,
            }
        )
    return checks


def run(plan: ExperimentPlan) -> Path:
    """Execute one scenario; returns its artifact directory.

    Any failure writes ``error_manifest.json`` into the scenario directory
    and raises ``ExperimentError`` so callers exit nonzero.
    """
    out = plan.out_dir / plan.scenario.value
    out.mkdir(parents=True, exist_ok=True)
    try:
        if plan.scenario in (Scenario.FIXED_GAMMA, Scenario.FIXED_GAMMA_TILDE):
            files = _run_strategy_scenario(plan, out)
        elif plan.scenario is Scenario.CONVERGE:
            files = _run_converge(plan, out)
        elif plan.scenario is Scenario.COMPARE:
            files = _run_compare(plan, out)
        elif plan.scenario is Scenario.TOTAL_COST:
            files = _run_total_cost(plan, out)
        else:  # pragma: no cover - enum is closed
            raise ValueError(f"unknown scenario {plan.scenario}")
        manifest = {
            "scenario": plan.scenario.value,
            "seed": plan.seed,
            "config_sha256": hashlib.sha256(
                plan.config.source_text.encode()
            ).hexdigest(),
            "phi0_values": list(plan.phi0_values),
            "alpha1_values": list(plan.alpha1_values),
            "n_values": list(plan.n_values),
            "artifacts": sorted(files),
            "condition_checks": _condition_checks(plan),
            "versions": {
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "numba": numba.__version__,
                "levyexec": __version__,
            },
        }
        (out / "manifest.json").write_text(
            json.dumps(manifest, sort_keys=True, indent=2) + "\n"
        )
        return out
    except Exception as exc:
        error = {
            "scenario": plan.scenario.value,
            "error": f"{type(exc).__name__}: {exc}",
            "config_sha256": hashlib.sha256(
                plan.config.source_text.encode()
            ).hexdigest(),
        }
        (out / "error_manifest.json").write_text(
            json.dumps(error, sort_keys=True, indent=2) + "\n"
        )
        raise ExperimentError(str(exc)) from exc
