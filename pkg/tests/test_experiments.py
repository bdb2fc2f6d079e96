"""Scenario runner tests: artifact schemas, determinism, failure manifests."""

import hashlib
import json

import numpy as np
import pytest

from levyexec.config import parse_config
from levyexec.experiments import (
    ExperimentError,
    ExperimentPlan,
    Scenario,
    run,
)

QUAD_CFG = """\
[market]
mu = 0.055
sigma = 0.1

[impact]
kind = quadratic
alpha0 = 0.01

[noise]
gamma = 1.0
alpha1 = 1.0
beta1 = 2.0

[problem]
t = 1.0
n = 20
phi0 = 1.0
grid_points = 50
"""

TILDE_CFG = QUAD_CFG.replace("gamma = 1.0", "gamma = 0.5").replace(
    "alpha1 = 1.0", "alpha1 = 0.5"
).replace("beta1 = 2.0", "beta1 = 1.0")

LIN_CFG = QUAD_CFG.replace("kind = quadratic", "kind = linear")


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


def test_fixed_gamma_artifacts_and_determinism(tmp_path):
    cfg = parse_config(QUAD_CFG)
    plan = ExperimentPlan.for_scenario(
        Scenario.FIXED_GAMMA, cfg, tmp_path, phi0_values=(1.0,),
        alpha1_values=(0.0, 1.0),
    )
    out = run(plan)
    assert out == tmp_path / "fixed-gamma"

    header, rows = read_csv(out / "strategy_phi1_alpha0.csv")
    assert header == ["r", "zeta", "phi"]
    assert len(rows) == cfg.n + 1  # one per step plus the terminal state
    r = np.array([float(x[0]) for x in rows])
    zeta = np.array([float(x[1]) for x in rows])
    phi = np.array([float(x[2]) for x in rows])
    assert r[0] == 0.0 and r[-1] == pytest.approx(1.0)
    assert phi[0] == 1.0 and np.all(np.diff(phi) <= 1e-15)
    assert zeta[-1] == 0.0
    # curve is the rate form of an admissible schedule
    blocks = zeta[:-1] / cfg.n
    assert blocks.sum() <= 1.0 + 1e-12
    np.testing.assert_allclose(phi[1:], phi[:-1] - blocks, atol=1e-15)

    header, rows = read_csv(out / "values.csv")
    assert header == ["phi0", "alpha1", "value"]
    assert len(rows) == 2

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config_sha256"] == hashlib.sha256(QUAD_CFG.encode()).hexdigest()
    assert manifest["artifacts"] == sorted(
        ["strategy_phi1_alpha0.csv", "strategy_phi1_alpha1.csv", "values.csv"]
    )
    assert [c["alpha1"] for c in manifest["condition_checks"]] == [0.0, 1.0]
    assert all(c["d_ok"] for c in manifest["condition_checks"])
    assert set(manifest["versions"]) == {"python", "numpy", "scipy", "numba", "levyexec"}

    # byte-identical rerun, manifest included
    before = {p.name: p.read_bytes() for p in out.iterdir()}
    run(plan)
    after = {p.name: p.read_bytes() for p in out.iterdir()}
    assert before == after


def test_fixed_gamma_tilde_resplits_noise(tmp_path):
    cfg = parse_config(TILDE_CFG)
    assert cfg.noise.gamma_tilde == pytest.approx(1.0)
    assert cfg.noise.jump_variance == pytest.approx(0.5)
    plan = ExperimentPlan.for_scenario(
        Scenario.FIXED_GAMMA_TILDE, cfg, tmp_path, phi0_values=(1.0,),
    )
    assert plan.alpha1_values == (0.0, 0.5, 1.0)
    out = run(plan)
    manifest = json.loads((out / "manifest.json").read_text())
    checks = manifest["condition_checks"]
    # the jump-free corner carries the whole mean in gamma
    assert checks[0]["gamma"] == pytest.approx(1.0)
    assert checks[1]["gamma"] == pytest.approx(0.5)
    assert checks[1]["beta1"] == pytest.approx(1.0)
    assert checks[2]["gamma"] == pytest.approx(1.0 - np.sqrt(0.5))
    assert (out / "strategy_phi1_alpha0.5.csv").exists()


def test_fixed_gamma_tilde_requires_jumpy_config(tmp_path):
    cfg = parse_config(QUAD_CFG.replace("alpha1 = 1.0", "alpha1 = 0.0"))
    plan = ExperimentPlan.for_scenario(
        Scenario.FIXED_GAMMA_TILDE, cfg, tmp_path, phi0_values=(1.0,)
    )
    with pytest.raises(ExperimentError, match="jumps"):
        run(plan)
    error = json.loads((tmp_path / "fixed-gamma-tilde" / "error_manifest.json").read_text())
    assert error["scenario"] == "fixed-gamma-tilde"
    assert "jumps" in error["error"]


def test_converge_scenario_linear_and_quadratic(tmp_path):
    lin = parse_config(LIN_CFG)
    out = run(ExperimentPlan.for_scenario(
        Scenario.CONVERGE, lin, tmp_path / "lin", n_values=(10, 20, 40)
    ))
    header, rows = read_csv(out / "convergence.csv")
    assert header == ["n", "value", "gap_prev", "gap_closed"]
    gaps = [float(r[3]) for r in rows]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert rows[0][2] == "nan"

    quad = parse_config(QUAD_CFG)
    out = run(ExperimentPlan.for_scenario(
        Scenario.CONVERGE, quad, tmp_path / "quad", n_values=(10, 20, 40)
    ))
    header, rows = read_csv(out / "convergence.csv")
    assert [float(r[3]) != float(r[3]) for r in rows] == [True] * 3  # all nan


def test_compare_scenario(tmp_path):
    cfg = parse_config(QUAD_CFG)
    out = run(ExperimentPlan.for_scenario(
        Scenario.COMPARE, cfg, tmp_path, alpha1_values=(0.0, 1.0, 3.0)
    ))
    header, rows = read_csv(out / "compare.csv")
    assert header == ["alpha1", "phi", "value_random", "value_baseline", "gap"]
    assert len(rows) == 3
    gap = [float(r[4]) for r in rows]
    assert gap[0] == 0.0
    assert all(g > 0 for g in gap[1:])


def test_total_cost_scenario(tmp_path):
    cfg = parse_config(TILDE_CFG)
    out = run(ExperimentPlan.for_scenario(
        Scenario.TOTAL_COST, cfg, tmp_path, phi0_values=(1.0, 10.0)
    ))
    header, rows = read_csv(out / "tc.csv")
    assert header == ["alpha1", "phi0", "value", "tc"]
    assert len(rows) == 6  # three alpha1 values times two positions
    assert all(float(r[3]) >= 0.0 for r in rows)
    # cost grows with the position size at every alpha1
    by_alpha = {}
    for r in rows:
        by_alpha.setdefault(r[0], []).append(float(r[3]))
    for costs in by_alpha.values():
        assert costs[1] > costs[0]
