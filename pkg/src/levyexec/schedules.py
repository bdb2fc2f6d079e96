"""Execution strategies: discrete block schedules and piecewise-constant rates.

Both forms are immutable value objects validated at construction.  A discrete
schedule sells block psi_l at time l/n; its rate form sells at n*psi_l on the
interval (l/n, (l+1)/n].  Rates use the closed-right convention throughout:
the value stored for an interval applies on (r_i, r_(i+1)], which makes the
rate path left-continuous; simulators therefore sample the value at the left
endpoint of each time step.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "DiscreteSchedule",
    "RateSchedule",
    "to_rate",
    "nearly_block",
    "append_terminal_block",
    "write_schedule_csv",
    "read_schedule_csv",
]

#: Absolute tolerance on inventory identities (sums of up to ~1e4 blocks).
SUM_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteSchedule:
    """Blocks psi_0..psi_(k-1) sold at times l/n out of initial inventory phi0.

    Admissibility: every block nonnegative and sum(blocks) <= phi0 (within
    SUM_TOL).  The schedule is a sell-off when the whole position is sold.
    """

    n: int
    blocks: tuple
    phi0: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", tuple(float(b) for b in self.blocks))
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.phi0 < 0:
            raise ValueError(f"phi0 must be >= 0, got {self.phi0}")
        if any(b < 0 for b in self.blocks):
            raise ValueError("blocks must be nonnegative")
        if self.total > self.phi0 + SUM_TOL:
            raise ValueError(
                f"blocks sum to {self.total}, exceeding phi0 = {self.phi0}"
            )

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def total(self) -> float:
        return float(np.sum(self.blocks)) if self.blocks else 0.0

    @property
    def is_selloff(self) -> bool:
        return abs(self.total - self.phi0) <= SUM_TOL

    @property
    def remainder(self) -> float:
        """Inventory left after the last block, floored at 0."""
        return max(self.phi0 - self.total, 0.0)


@dataclass(frozen=True)
class RateSchedule:
    """Piecewise-constant sale rate: rates[i] applies on (breakpoints[i], breakpoints[i+1]].

    breakpoints must be strictly increasing and start at 0; len(rates) =
    len(breakpoints) - 1.  The integral of the rate is the amount sold.
    """

    breakpoints: tuple
    rates: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "breakpoints", tuple(float(b) for b in self.breakpoints))
        object.__setattr__(self, "rates", tuple(float(z) for z in self.rates))
        bp = self.breakpoints
        if len(bp) < 1 or bp[0] != 0.0:
            raise ValueError("breakpoints must start at 0")
        if any(b >= a for a, b in zip(bp[1:], bp[:-1])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(self.rates) != len(bp) - 1:
            raise ValueError("need exactly one rate per interval")
        if any(z < 0 for z in self.rates):
            raise ValueError("rates must be nonnegative")
        if not all(np.isfinite(self.rates)):
            raise ValueError("rates must be finite")

    @property
    def horizon(self) -> float:
        return self.breakpoints[-1]

    def integral(self) -> float:
        widths = np.diff(self.breakpoints)
        return float(np.dot(widths, self.rates)) if len(self.rates) else 0.0

    def rate_at(self, r) -> np.ndarray:
        """Rate used for the step starting at r (left-endpoint sampling).

        For r in [breakpoints[i], breakpoints[i+1]) this is rates[i]: the value
        in force just after r, which is what a simulator stepping over
        [r, r + dr] must apply.  r at or beyond the horizon maps to the last
        interval's rate.
        """
        rr = np.asarray(r, dtype=float)
        if np.any(rr < 0):
            raise ValueError("r must be >= 0")
        idx = np.searchsorted(self.breakpoints, rr, side="right") - 1
        idx = np.clip(idx, 0, len(self.rates) - 1)
        out = np.asarray(self.rates, dtype=float)[idx]
        return float(out) if np.ndim(r) == 0 else out


def to_rate(d: DiscreteSchedule) -> RateSchedule:
    """Rate form of a discrete schedule: n*psi_l on ((l)/n, (l+1)/n]."""
    if d.k == 0:
        return RateSchedule((0.0, 1.0 / d.n), (0.0,))
    bp = tuple(l / d.n for l in range(d.k + 1))
    return RateSchedule(bp, tuple(d.n * b for b in d.blocks))


def nearly_block(phi: float, delta: float, t: float) -> RateSchedule:
    """Sell phi at constant rate phi/delta on (0, delta], then stop until t.

    As delta shrinks this approaches an instantaneous block sale.
    """
    if not 0 < delta <= t:
        raise ValueError(f"need 0 < delta <= t, got delta={delta}, t={t}")
    if phi < 0:
        raise ValueError(f"phi must be >= 0, got {phi}")
    if phi == 0:
        return RateSchedule((0.0, t), (0.0,))
    if delta == t:
        return RateSchedule((0.0, t), (phi / delta,))
    return RateSchedule((0.0, delta, t), (phi / delta, 0.0))


def append_terminal_block(d: DiscreteSchedule) -> DiscreteSchedule:
    """Force the sell-off condition by augmenting the final block.

    The remaining inventory is added to psi_(k-1), keeping the number of
    periods fixed.  A schedule that already sells off is returned unchanged.
    """
    if d.is_selloff:
        return d
    if d.k == 0:
        raise ValueError("cannot augment an empty schedule")
    blocks = list(d.blocks)
    blocks[-1] += d.phi0 - d.total
    return DiscreteSchedule(d.n, tuple(blocks), d.phi0)


# ---------------------------------------------------------------------------
# CSV interchange
# ---------------------------------------------------------------------------

_DISCRETE_HEADER = ["index", "psi"]
_RATE_HEADER = ["r_start", "r_end", "zeta"]


def _fmt(x: float) -> str:
    # %.17g round-trips doubles exactly and is byte-stable across runs
    return format(float(x), ".17g")


def write_schedule_csv(sched: Union[DiscreteSchedule, RateSchedule], path) -> None:
    """Write a schedule in its interchange form.

    Discrete schedules use columns (index, psi); rate schedules use
    (r_start, r_end, zeta).  Discrete metadata (n, phi0) is carried in
    comment lines so the file round-trips.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if isinstance(sched, DiscreteSchedule):
        buf.write(f"# n={sched.n} phi0={_fmt(sched.phi0)}\n")
        w.writerow(_DISCRETE_HEADER)
        for l, b in enumerate(sched.blocks):
            w.writerow([l, _fmt(b)])
    elif isinstance(sched, RateSchedule):
        w.writerow(_RATE_HEADER)
        for i, z in enumerate(sched.rates):
            w.writerow([_fmt(sched.breakpoints[i]), _fmt(sched.breakpoints[i + 1]), _fmt(z)])
    else:
        raise TypeError(f"not a schedule: {type(sched)!r}")
    Path(path).write_text(buf.getvalue())


def read_schedule_csv(path, n: int = None, phi0: float = None):
    """Read a schedule CSV, detecting the form from its header.

    For discrete files, n and phi0 default to the values in the comment line
    and may be overridden by the keyword arguments.
    """
    text = Path(path).read_text()
    meta = {}
    lines = []
    for line in text.splitlines():
        if line.startswith("#"):
            for part in line[1:].split():
                if "=" in part:
                    key, val = part.split("=", 1)
                    meta[key] = val
        elif line.strip():
            lines.append(line)
    if not lines:
        raise ValueError(f"{path}: empty schedule file")
    rows = list(csv.reader(lines))
    header = [c.strip() for c in rows[0]]
    if header == _DISCRETE_HEADER:
        if n is None:
            n = int(meta.get("n", 0)) or None
        if phi0 is None:
            phi0 = float(meta["phi0"]) if "phi0" in meta else None
        blocks = tuple(float(r[1]) for r in rows[1:])
        if n is None:
            raise ValueError(f"{path}: discrete schedule needs n (metadata or argument)")
        if phi0 is None:
            phi0 = float(np.sum(blocks))
        return DiscreteSchedule(n, blocks, phi0)
    if header == _RATE_HEADER:
        starts = [float(r[0]) for r in rows[1:]]
        ends = [float(r[1]) for r in rows[1:]]
        rates = tuple(float(r[2]) for r in rows[1:])
        for e, s_next in zip(ends[:-1], starts[1:]):
            if abs(e - s_next) > SUM_TOL:
                raise ValueError(f"{path}: rate intervals must be contiguous")
        return RateSchedule(tuple(starts) + (ends[-1],), rates)
    raise ValueError(f"{path}: unrecognized schedule header {header}")
