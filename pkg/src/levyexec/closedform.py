"""Closed-form values, the impact-noise comparison, and the cost metric.

These are the quantitative anchors the solver and the simulators are
measured against: the log-linear block-trade value, the normalized total
cost of market impact, the random-vs-deterministic value comparison, and
the reparameterization that holds the mean impact fixed while moving
variance into the jump component.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .models import NoiseModel
from .solver import SolveMode, SolveSpec, solve

__all__ = [
    "ComparisonReport",
    "loglinear_value",
    "total_mi_cost",
    "compare_random_vs_baseline",
    "fixed_gamma_tilde_params",
]

# below this, (1 - e^{-x})/x loses digits to cancellation; switch to the series
_SERIES_CUTOFF = 1e-8


def loglinear_value(w: float, phi: float, s: float, gamma: float, alpha0: float) -> float:
    """Optimal expected proceeds under impact proportional to the trade rate.

    The value is w + (1 - e^{-gamma*alpha0*phi})/(gamma*alpha0) * s for any
    positive horizon; it does not depend on the horizon or on the jump part
    of the impact noise.
    """
    if phi < 0:
        raise ValueError("phi must be nonnegative")
    z = gamma * alpha0
    if z < 0:
        raise ValueError("gamma*alpha0 must be nonnegative")
    x = z * phi
    if z < _SERIES_CUTOFF:
        return w + s * phi * (1.0 - x / 2.0 + x * x / 6.0)
    return w + s * (-math.expm1(-x)) / z


def total_mi_cost(value_at_t: float, phi0: float, s: float) -> float:
    """Normalized liquidation cost: -log(value / (phi0 * s)).

    Zero when the full position value is realized, positive otherwise. A
    value slightly above phi0*s (grid error) is clamped to cost 0 with a
    warning rather than reported as a negative cost.
    """
    if phi0 <= 0 or s <= 0:
        raise ValueError("phi0 and s must be positive")
    if value_at_t <= 0:
        raise ValueError("value must be positive")
    ratio = value_at_t / (phi0 * s)
    if ratio > 1.0:
        warnings.warn(
            f"value {value_at_t} exceeds the frictionless bound {phi0 * s}; "
            "clamping cost to 0",
            UserWarning,
            stacklevel=2,
        )
        return 0.0
    return -math.log(ratio)


@dataclass(frozen=True)
class ComparisonReport:
    """Values of the random-impact and mean-impact problems on a shared grid.

    Arrays are indexed [alpha1, phi]. The gap is nonnegative at every point:
    randomizing the impact around a fixed mean never hurts expected proceeds.
    """

    alpha1_values: tuple[float, ...]
    phi_values: tuple[float, ...]
    value_random: np.ndarray
    value_baseline: np.ndarray

    @property
    def gap(self) -> np.ndarray:
        return self.value_random - self.value_baseline

    def check(self) -> None:
        if np.any(self.gap < 0):
            raise AssertionError("random-impact value fell below its mean-impact floor")
        for i, a1 in enumerate(self.alpha1_values):
            if a1 == 0.0 and np.any(self.gap[i] != 0.0):
                raise AssertionError("gap must vanish identically when alpha1 = 0")


def compare_random_vs_baseline(
    base: SolveSpec,
    alpha1_values: Sequence[float],
    phi_values: Sequence[float] | None = None,
) -> ComparisonReport:
    """Solve both problem variants for each alpha1 and tabulate the value gap.

    Every solve shares the inventory grid of ``base``; gamma and beta1 are
    inherited, only alpha1 varies. ``phi_values`` must sit on grid nodes
    (defaults to the full position phi_max).
    """
    if phi_values is None:
        phi_values = (base.phi_max,)
    phi_values = tuple(float(p) for p in phi_values)

    step = base.phi_max / base.grid_points
    idx = []
    for p in phi_values:
        i = int(round(p / step))
        if not (0 <= i <= base.grid_points) or abs(i * step - p) > 1e-9 * max(1.0, p):
            raise ValueError(f"phi = {p} is not a node of the inventory grid")
        idx.append(i)

    v_rand = np.empty((len(alpha1_values), len(phi_values)))
    v_base = np.empty_like(v_rand)
    for a, a1 in enumerate(alpha1_values):
        noise = NoiseModel(base.noise.gamma, float(a1), base.noise.beta1)
        rand = solve(replace(base, noise=noise, mode=SolveMode.RANDOM))
        det = solve(replace(base, noise=noise, mode=SolveMode.BASELINE))
        v_rand[a] = rand.values[-1, idx]
        v_base[a] = det.values[-1, idx]

    report = ComparisonReport(
        tuple(float(a) for a in alpha1_values), phi_values, v_rand, v_base
    )
    report.check()
    return report


def fixed_gamma_tilde_params(
    gamma_tilde: float, jump_var: float, alpha1: float
) -> tuple[float, float]:
    """Split a fixed mean impact into drift and jumps of given variance.

    Solves gamma + alpha1*beta1 = gamma_tilde with alpha1*beta1^2 = jump_var,
    returning (gamma, beta1). alpha1 = 0 is the jump-free corner: all of the
    mean sits in gamma and beta1 is reported as 0.
    """
    if gamma_tilde <= 0:
        raise ValueError("gamma_tilde must be positive")
    if jump_var < 0 or alpha1 < 0:
        raise ValueError("jump_var and alpha1 must be nonnegative")
    if alpha1 == 0.0 or jump_var == 0.0:
        # jump-free corner: the whole mean sits in gamma
        return gamma_tilde, 0.0
    beta1 = math.sqrt(jump_var / alpha1)
    gamma = gamma_tilde - alpha1 * beta1
    if gamma < 0:
        raise ValueError(
            f"infeasible split: jump mean {alpha1 * beta1} exceeds gamma_tilde {gamma_tilde}"
        )
    if gamma < alpha1 * beta1 / 8.0:
        # sufficient (not necessary) drift floor for the quadratic analysis
        warnings.warn(
            f"gamma = {gamma} is below alpha1*beta1/8 = {alpha1 * beta1 / 8.0}; "
            "the usual sufficient condition fails, results are unguaranteed",
            UserWarning,
            stacklevel=2,
        )
    return gamma, beta1
