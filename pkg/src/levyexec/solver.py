"""Backward-induction solver for the risk-neutral execution value function.

The value is computed in normalized coordinates (initial cash 0, price 1) as

    G_j(phi) = max over grid blocks psi <= phi of
               D(psi) * (psi + exp(-mu_tilde/n) * G_(j-1)(phi - psi)),
    G_0 = 0,

where D(psi) is the exact per-step expected impact factor.  The trade's own
factor multiplies both the immediate proceeds and the continuation because a
sale displaces the price permanently.  The full value function is recovered
by linearity: V(w, phi, s) = w + s * G_k(phi).

The inventory grid is uniform with M intervals on [0, phi_max] and candidate
blocks are restricted to grid multiples, so phi - psi stays on-grid and the
recursion is exact on its own lattice (no interpolation).  Argmax ties break
toward the smallest block, which makes extracted policies deterministic.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np
from numba import njit

from .models import (
    ImpactKind,
    ImpactModel,
    MarketParams,
    NoiseModel,
    step_decay_factor,
    validate_conditions,
)
from .schedules import DiscreteSchedule

__all__ = [
    "SolveMode",
    "SolveSpec",
    "ValueSurface",
    "ConvergenceRow",
    "solve",
    "solve_selloff",
    "extract_schedule",
    "evaluate_discrete",
    "convergence_sweep",
    "default_grid_points",
]


class SolveMode(Enum):
    RANDOM = "random"
    BASELINE = "baseline"
    SELLOFF = "selloff"


def default_grid_points(phi0: float) -> int:
    """Grid size rule used when the problem config does not pin one."""
    return 1000 if phi0 <= 10 else 2000


@dataclass(frozen=True)
class SolveSpec:
    """Everything one DP solve needs.

    k is the number of trading periods ([n*t] for horizon t); M the number of
    inventory-grid intervals on [0, phi_max].
    """

    market: MarketParams
    impact: ImpactModel
    noise: NoiseModel
    n: int
    k: int
    grid_points: int
    phi_max: float
    mode: SolveMode = SolveMode.RANDOM

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.k < 0:
            raise ValueError(f"k must be >= 0, got {self.k}")
        if self.k > self.n:
            raise ValueError(f"k = {self.k} exceeds n = {self.n}; the horizon is at most 1")
        if self.grid_points < 0:
            raise ValueError("grid_points must be >= 0")
        if self.phi_max < 0:
            raise ValueError("phi_max must be >= 0")
        if not self.market.mu_tilde > 0:
            raise ValueError(
                f"mu_tilde = {self.market.mu_tilde} must be > 0 (mu > sigma^2/2)"
            )
        if 0 < self.grid_points < self.k:
            warnings.warn(
                f"grid_points = {self.grid_points} < k = {self.k}: the grid cannot "
                "resolve one block per period",
                stacklevel=2,
            )

    @classmethod
    def from_problem(
        cls,
        market: MarketParams,
        impact: ImpactModel,
        noise: NoiseModel,
        t: float,
        n: int,
        phi0: float,
        grid_points: Optional[int] = None,
        mode: SolveMode = SolveMode.RANDOM,
    ) -> "SolveSpec":
        """Build a spec from horizon t, applying the default grid rule."""
        if not 0 <= t <= 1:
            raise ValueError(f"t must lie in [0, 1], got {t}")
        if grid_points is None:
            grid_points = default_grid_points(phi0)
        return cls(
            market=market,
            impact=impact,
            noise=noise,
            n=n,
            k=int(np.floor(n * t + 1e-12)),
            grid_points=grid_points,
            phi_max=phi0,
            mode=mode,
        )

    @property
    def t(self) -> float:
        return self.k / self.n


@dataclass
class ValueSurface:
    """DP output: values G_j(phi_i) for j = 0..k plus the argmax policy.

    grid: inventory nodes, shape (M+1,).
    values: shape (k+1, M+1); row j is the value with j periods remaining.
    policy: shape (k, M+1) int32; policy[j-1, i] is the argmax block index used
    to build row j from row j-1.
    """

    grid: np.ndarray
    values: np.ndarray
    policy: np.ndarray
    spec: SolveSpec

    @property
    def k(self) -> int:
        return self.values.shape[0] - 1

    def value(self, w: float = 0.0, s: float = 1.0) -> float:
        """V(w, phi_max, s) at the full horizon, mapped out by linearity."""
        return w + s * float(self.values[-1, -1])

    def node_value(self, j: int, i: int) -> float:
        return float(self.values[j, i])

    def check_invariants(self, tol: float = 1e-12) -> None:
        """Assert the structural properties every surface must satisfy."""
        G = self.values
        if not np.all(G[:, 0] == 0.0):
            raise AssertionError("G_j(0) must be 0")
        if np.any(np.diff(G, axis=0) < 0):
            raise AssertionError("G must be nondecreasing in steps-remaining j")
        if self.spec.mode is not SolveMode.SELLOFF and np.any(np.diff(G, axis=1) < 0):
            # forced liquidation can make extra inventory a liability, so the
            # phi-monotonicity argument only covers the unconstrained modes
            raise AssertionError("G must be nondecreasing in phi")
        if np.any(G < 0) or np.any(G > self.grid[None, :] * (1 + tol) + tol):
            raise AssertionError("G must lie in [0, phi]")


@njit(cache=True)
def _backward_kernel(decay, psi, disc, k, selloff):
    """Run the recursion; layer j is built from layer j-1 independently per node.

    Ties in the max break toward the smallest block index because only a
    strictly larger candidate replaces the incumbent.
    """
    m_nodes = psi.shape[0]
    values = np.zeros((k + 1, m_nodes))
    policy = np.zeros((k, m_nodes), dtype=np.int32)
    g_prev = values[0]
    for j in range(1, k + 1):
        g_next = values[j]
        if selloff and j == 1:
            # terminal period of a sell-off: the whole remaining position goes
            for i in range(m_nodes):
                g_next[i] = decay[i] * (psi[i] + disc * g_prev[0])
                policy[0, i] = i
        else:
            for i in range(m_nodes):
                best = -1.0
                arg = 0
                for m in range(i + 1):
                    cand = decay[m] * (psi[m] + disc * g_prev[i - m])
                    if cand > best:
                        best = cand
                        arg = m
                g_next[i] = best
                policy[j - 1, i] = arg
        g_prev = g_next
    return values, policy


def _decay_on_grid(spec: SolveSpec, psi: np.ndarray) -> np.ndarray:
    if spec.mode is SolveMode.BASELINE:
        # deterministic-impact baseline: the multiplier is replaced by its mean
        g = np.asarray(spec.impact.g_n(psi, spec.n), dtype=float)
        return np.exp(-spec.noise.gamma_tilde * g)
    return np.asarray(step_decay_factor(spec.impact, spec.noise, spec.n, psi), dtype=float)


def solve(spec: SolveSpec) -> ValueSurface:
    """Solve the DP and return the full value surface with its policy.

    k = 0 or an empty grid yields the trivial all-zero surface.  In the random
    quadratic mode a violated sufficient condition gamma >= alpha1*beta1/8 is
    reported as a warning (the DP itself is unaffected).
    """
    if (
        spec.mode is SolveMode.RANDOM
        and spec.impact.kind is ImpactKind.QUADRATIC
        and not validate_conditions(spec.market, spec.impact, spec.noise, spec.n).d_ok
    ):
        warnings.warn(
            "gamma < alpha1*beta1/8: the deterministic-reduction condition fails; "
            "values are still well-defined",
            stacklevel=2,
        )
    m = spec.grid_points
    grid = np.linspace(0.0, spec.phi_max, m + 1) if m > 0 else np.zeros(1)
    if spec.k == 0 or m == 0:
        values = np.zeros((spec.k + 1, grid.shape[0]))
        policy = np.zeros((spec.k, grid.shape[0]), dtype=np.int32)
        return ValueSurface(grid=grid, values=values, policy=policy, spec=spec)
    decay = _decay_on_grid(spec, grid)
    disc = float(np.exp(-spec.market.mu_tilde / spec.n))
    values, policy = _backward_kernel(
        decay, grid, disc, spec.k, spec.mode is SolveMode.SELLOFF
    )
    return ValueSurface(grid=grid, values=values, policy=policy, spec=spec)


def solve_selloff(spec: SolveSpec) -> ValueSurface:
    """Solve with the terminal full-liquidation rule regardless of spec.mode."""
    forced = SolveSpec(
        market=spec.market,
        impact=spec.impact,
        noise=spec.noise,
        n=spec.n,
        k=spec.k,
        grid_points=spec.grid_points,
        phi_max=spec.phi_max,
        mode=SolveMode.SELLOFF,
    )
    return solve(forced)


def extract_schedule(surface: ValueSurface, phi0: float) -> DiscreteSchedule:
    """Forward pass over the stored argmax: the optimal block sequence from phi0.

    phi0 must be a grid node; otherwise it is snapped down to the nearest node
    and the snap is reported as a warning.
    """
    grid = surface.grid
    m = len(grid) - 1
    step = grid[-1] / m if m > 0 else 0.0
    if step == 0.0:
        return DiscreteSchedule(surface.spec.n, (0.0,) * surface.k, phi0)
    i0 = min(max(int(np.floor(phi0 / step + 1e-9)), 0), m)
    if abs(grid[i0] - phi0) > 1e-9 * max(1.0, phi0):
        warnings.warn(
            f"phi0 = {phi0} is off-grid; snapped down to {grid[i0]}", stacklevel=2
        )
    blocks = []
    i = i0
    for j in range(surface.k, 0, -1):
        arg = int(surface.policy[j - 1, i])
        # grid node values, not arg*step: bitwise identical to what the DP saw
        blocks.append(float(grid[arg]))
        i -= arg
    return DiscreteSchedule(surface.spec.n, tuple(blocks), float(grid[i0]))


def evaluate_discrete(schedule: DiscreteSchedule, spec: SolveSpec, w: float = 0.0, s: float = 1.0) -> float:
    """Exact expected proceeds of a fixed schedule, no sampling error.

    E = w + s * sum_l psi_l e^(-mu_tilde l/n) prod_(m<=l) D(psi_m): the factor
    of every past trade persists in the price, and the trade's own factor
    applies to its own proceeds.  Blocks need not lie on any grid.
    """
    if schedule.k > spec.k:
        raise ValueError(f"schedule has {schedule.k} blocks but the horizon allows {spec.k}")
    if schedule.n != spec.n:
        raise ValueError(f"schedule n = {schedule.n} does not match spec n = {spec.n}")
    psi = np.asarray(schedule.blocks, dtype=float)
    if psi.size == 0:
        return w
    if spec.mode is SolveMode.BASELINE:
        g = np.asarray(spec.impact.g_n(psi, spec.n), dtype=float)
        decay = np.exp(-spec.noise.gamma_tilde * g)
    else:
        decay = np.asarray(step_decay_factor(spec.impact, spec.noise, spec.n, psi), dtype=float)
    impact_so_far = np.cumprod(decay)
    drift = np.exp(-spec.market.mu_tilde * np.arange(schedule.k) / spec.n)
    return w + s * float(np.sum(psi * drift * impact_so_far))


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    value: float
    gap_prev: float  # |value - previous value|; nan on the first row
    gap_closed: float  # |value - closed form|; nan when no closed form applies


def convergence_sweep(
    spec: SolveSpec,
    n_list: Sequence[int],
    closed_form: Optional[float] = None,
    grid_points_for_n=None,
) -> list:
    """Re-solve at each n in n_list (same horizon t) and report successive gaps.

    grid_points_for_n optionally maps n to a grid size; by default the spec's
    grid is reused.  Pinning the rate resolution (e.g. M proportional to n)
    is essential when the quantity of interest is the pure step-count error,
    because the rate-grid step is n*phi_max/M.
    """
    if list(n_list) != sorted(set(n_list)):
        raise ValueError("n_list must be strictly increasing")
    t = spec.t
    rows = []
    prev = None
    for n in n_list:
        m = spec.grid_points if grid_points_for_n is None else int(grid_points_for_n(n))
        sp = SolveSpec(
            market=spec.market,
            impact=spec.impact,
            noise=spec.noise,
            n=n,
            k=int(np.floor(n * t + 1e-12)),
            grid_points=m,
            phi_max=spec.phi_max,
            mode=spec.mode,
        )
        v = solve(sp).value()
        rows.append(
            ConvergenceRow(
                n=n,
                value=v,
                gap_prev=abs(v - prev) if prev is not None else float("nan"),
                gap_closed=abs(v - closed_form) if closed_form is not None else float("nan"),
            )
        )
        prev = v
    return rows
