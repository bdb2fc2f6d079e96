"""Readers for the experiment CSV artifact tree.

The renderer consumes two artifact kinds:

* strategy curves, ``strategy_phi{phi0}_alpha{alpha1}.csv`` with columns
  (r, zeta, phi), one file per (phi0, alpha1);
* the total-cost table, ``tc.csv`` with columns (alpha1, phi0, value, tc).

Anything malformed raises SchemaError naming the offending file and column,
so a broken tree fails loudly before any image is written.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

__all__ = [
    "SchemaError",
    "StrategyCurve",
    "TotalCostTable",
    "read_strategy_csv",
    "read_tc_csv",
    "strategy_coords",
]


class SchemaError(ValueError):
    """An artifact CSV is missing, empty, or malformed."""


@dataclass(frozen=True)
class StrategyCurve:
    """One optimal schedule in rate form: zeta and phi sampled at times r."""

    phi0: float
    alpha1: float
    r: tuple[float, ...]
    zeta: tuple[float, ...]
    phi: tuple[float, ...]


@dataclass(frozen=True)
class TotalCostTable:
    """Rows of the total-cost table, coordinate columns kept alongside."""

    alpha1: tuple[float, ...]
    phi0: tuple[float, ...]
    tc: tuple[float, ...]


_STRATEGY_NAME = re.compile(r"strategy_phi(?P<phi0>[0-9.]+)_alpha(?P<alpha1>[0-9.]+)\.csv")


def strategy_coords(path) -> Optional[tuple[float, float]]:
    """(phi0, alpha1) encoded in a strategy filename; None if the name is not one."""
    m = _STRATEGY_NAME.fullmatch(Path(path).name)
    if m is None:
        return None
    return float(m.group("phi0")), float(m.group("alpha1"))


def _read_columns(path: Path, required: tuple[str, ...]) -> dict[str, list[float]]:
    """Parse the named columns out of a headered CSV, strictly."""
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read ({exc})") from exc
    lines = [line for line in text.splitlines() if line.strip() != ""]
    if not lines:
        raise SchemaError(f"{path}: empty file")
    header = [cell.strip() for cell in lines[0].split(",")]
    missing = [name for name in required if name not in header]
    if missing:
        raise SchemaError(f"{path}: missing column(s): {', '.join(missing)}")
    if len(lines) == 1:
        raise SchemaError(f"{path}: no data rows")
    index = {name: header.index(name) for name in required}
    columns: dict[str, list[float]] = {name: [] for name in required}
    for line_no, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise SchemaError(
                f"{path}: row {line_no} has {len(cells)} cells, header has {len(header)}"
            )
        for name in required:
            cell = cells[index[name]].strip()
            try:
                columns[name].append(float(cell))
            except ValueError as exc:
                raise SchemaError(
                    f"{path}: row {line_no}, column {name}: not a number: {cell!r}"
                ) from exc
    return columns


def read_strategy_csv(path) -> StrategyCurve:
    """Read one strategy file; phi0 and alpha1 come from the filename."""
    path = Path(path)
    coords = strategy_coords(path)
    if coords is None:
        raise SchemaError(
            f"{path}: name does not match strategy_phi<phi0>_alpha<alpha1>.csv"
        )
    cols = _read_columns(path, ("r", "zeta", "phi"))
    return StrategyCurve(
        phi0=coords[0],
        alpha1=coords[1],
        r=tuple(cols["r"]),
        zeta=tuple(cols["zeta"]),
        phi=tuple(cols["phi"]),
    )


def read_tc_csv(path) -> TotalCostTable:
    path = Path(path)
    cols = _read_columns(path, ("alpha1", "phi0", "value", "tc"))
    return TotalCostTable(
        alpha1=tuple(cols["alpha1"]),
        phi0=tuple(cols["phi0"]),
        tc=tuple(cols["tc"]),
    )
