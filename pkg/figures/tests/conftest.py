"""Shared fixture: a synthetic artifact tree shaped like a complete run.

Three scenario directories, strategy curves for three initial positions
under three activity levels each, plus the total-cost table.  The decoy
files (values.csv, manifest.json) mirror what a real run leaves behind and
must be ignored by discovery.
"""

from pathlib import Path

import pytest

STRATEGY_LAYOUT = {
    "fixed-gamma": ((1.0, 10.0, 100.0), (0.0, 1.0, 3.0)),
    "fixed-gamma-tilde": ((1.0, 10.0, 100.0), (0.0, 0.5, 1.0)),
}


def write_strategy(path: Path, phi0: float, alpha1: float, steps: int = 4) -> Path:
    """Write a small well-formed strategy curve that varies with its coordinates."""
    decay = 0.5 + 0.05 * alpha1
    lines = ["r,zeta,phi"]
    phi = phi0
    for i in range(steps + 1):
        r = i / steps
        zeta = 0.0 if i == steps else (1.0 - decay) * phi * steps
        lines.append(f"{r:.17g},{zeta:.17g},{phi:.17g}")
        phi *= decay
    path.write_text("\n".join(lines) + "\n")
    return path


def write_tc(path: Path) -> Path:
    lines = ["alpha1,phi0,value,tc"]
    for alpha1 in (0.0, 1.0, 3.0):
        for phi0 in (1.0, 10.0):
            value = phi0 * (0.95 - 0.01 * alpha1)
            lines.append(f"{alpha1:g},{phi0:g},{value:.17g},{phi0 - value:.17g}")
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def artifact_tree(tmp_path) -> Path:
    root = tmp_path / "artifacts"
    for scenario, (phi0s, alphas) in STRATEGY_LAYOUT.items():
        sub = root / scenario
        sub.mkdir(parents=True)
        for phi0 in phi0s:
            for alpha1 in alphas:
                write_strategy(
                    sub / f"strategy_phi{phi0:g}_alpha{alpha1:g}.csv", phi0, alpha1
                )
        (sub / "values.csv").write_text("phi0,alpha1,value\n1,0,0.95\n")
        (sub / "manifest.json").write_text("{}\n")
    (root / "tc").mkdir()
    write_tc(root / "tc" / "tc.csv")
    return root
