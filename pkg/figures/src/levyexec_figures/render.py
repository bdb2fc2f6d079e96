"""Deterministic matplotlib rendering of the experiment figures.

Each strategy scenario yields one two-panel figure per initial position
(left panel: sale rate zeta against time, right panel: remaining holdings
phi), with one curve per jump activity alpha1.  The total-cost table yields
a single grouped bar chart.  Style is pinned through an explicit rc context
and fixed image metadata, so the same CSV bytes render to the same image
bytes run after run.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from dataclasses import dataclass
from pathlib import Path

from .artifacts import SchemaError, read_strategy_csv, read_tc_csv, strategy_coords

__all__ = ["FigureSpec", "STRATEGY_SCENARIOS", "plan_figures", "render"]

STRATEGY_SCENARIOS = ("fixed-gamma", "fixed-gamma-tilde")

_STYLE = {
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
    "legend.frameon": False,
}

# Fixed metadata keeps toolchain version strings out of the image bytes.
_METADATA = {"Software": "levyexec-figures"}


@dataclass(frozen=True)
class FigureSpec:
    """One figure to render: its input CSVs, title, and output path.

    ``kind`` is "strategy" (two panels, one curve per source file, legend
    in source order) or "tc" (single bar chart from one table).
    """

    kind: str
    title: str
    sources: tuple[Path, ...]
    out_path: Path


def plan_figures(in_dir, out_dir, image_format: str = "png") -> list[FigureSpec]:
    """Map an artifact tree to the figures it supports.

    Strategy files are grouped by initial position within each scenario
    directory; curves within a group are ordered by ascending alpha1 so the
    legend reads bottom-up in activity.  Output paths mirror the scenario
    layout under ``out_dir``.
    """
    in_dir = Path(in_dir)
    out_dir = Path(out_dir)
    specs: list[FigureSpec] = []
    for scenario in STRATEGY_SCENARIOS:
        sub = in_dir / scenario
        if not sub.is_dir():
            continue
        groups: dict[float, list[tuple[float, Path]]] = {}
        for path in sorted(sub.glob("strategy_phi*_alpha*.csv")):
            coords = strategy_coords(path)
            if coords is None:
                continue
            phi0, alpha1 = coords
            groups.setdefault(phi0, []).append((alpha1, path))
        for phi0 in sorted(groups):
            ordered = sorted(groups[phi0])
            specs.append(
                FigureSpec(
                    kind="strategy",
                    title=f"{scenario}, phi0 = {phi0:g}",
                    sources=tuple(path for _, path in ordered),
                    out_path=out_dir / scenario / f"figure_phi{phi0:g}.{image_format}",
                )
            )
    tc_path = in_dir / "tc" / "tc.csv"
    if tc_path.is_file():
        specs.append(
            FigureSpec(
                kind="tc",
                title="total impact cost",
                sources=(tc_path,),
                out_path=out_dir / "tc" / f"figure_tc.{image_format}",
            )
        )
    if not specs:
        raise SchemaError(
            f"{in_dir}: no renderable artifacts "
            f"(expected {', '.join(STRATEGY_SCENARIOS)} and/or tc/tc.csv)"
        )
    return specs


def _render_strategy(spec: FigureSpec):
    curves = [read_strategy_csv(path) for path in spec.sources]
    fig, (ax_rate, ax_pos) = plt.subplots(
        1, 2, figsize=(8.0, 3.2), constrained_layout=True
    )
    for curve in curves:
        label = f"alpha1 = {curve.alpha1:g}"
        ax_rate.plot(curve.r, curve.zeta, label=label)
        ax_pos.plot(curve.r, curve.phi, label=label)
    ax_rate.set_xlabel("r")
    ax_rate.set_ylabel("zeta")
    ax_rate.set_title("sale rate")
    ax_rate.legend()
    ax_pos.set_xlabel("r")
    ax_pos.set_ylabel("phi")
    ax_pos.set_title("holdings")
    fig.suptitle(spec.title)
    return fig


def _render_tc(spec: FigureSpec):
    table = read_tc_csv(spec.sources[0])
    alphas = sorted(set(table.alpha1))
    phi0s = sorted(set(table.phi0))
    fig, ax = plt.subplots(figsize=(4.6, 3.2), constrained_layout=True)
    width = 0.8 / len(phi0s)
    cells = {
        (a, p): tc for a, p, tc in zip(table.alpha1, table.phi0, table.tc)
    }
    for j, phi0 in enumerate(phi0s):
        offset = (j - (len(phi0s) - 1) / 2) * width
        xs = [i + offset for i, a in enumerate(alphas) if (a, phi0) in cells]
        ys = [cells[a, phi0] for a in alphas if (a, phi0) in cells]
        ax.bar(xs, ys, width=width, label=f"phi0 = {phi0:g}")
    ax.set_xticks(range(len(alphas)), [f"{a:g}" for a in alphas])
    ax.set_xlabel("alpha1")
    ax.set_ylabel("TC")
    ax.set_title(spec.title)
    ax.legend()
    return fig


def render(spec: FigureSpec) -> Path:
    """Render one figure and return the written path.

    All sources are read and validated before the figure is opened, so a
    schema error never leaves a partial image behind.
    """
    with plt.rc_context(_STYLE):
        if spec.kind == "strategy":
            fig = _render_strategy(spec)
        elif spec.kind == "tc":
            fig = _render_tc(spec)
        else:
            raise ValueError(f"unknown figure kind: {spec.kind!r}")
        try:
            spec.out_path.parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(spec.out_path, metadata=_METADATA)
        finally:
            plt.close(fig)
    return spec.out_path
