"""Market, impact, and noise primitives for the execution model.

The security price is multiplicative in the impact: a sale of psi at step l
of the n-step scheme knocks the log price down by c_l * g_n(psi), where
c_l = gamma + Gamma(alpha1/n, n*beta1) is an i.i.d. random impact multiplier.

Every Gamma law in this package is parameterized by (shape, scale), matching
the increment density x**(shape-1) * exp(-x/scale) / (Gamma(shape)*scale**shape).
This convention is repeated at each interface because the shape/rate mix-up is
the classic bug in this model family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "MarketParams",
    "ImpactKind",
    "ImpactModel",
    "NoiseModel",
    "UtilityFn",
    "RISK_NEUTRAL",
    "ConditionsReport",
    "step_decay_factor",
    "effective_impact_ghat",
    "effective_impact_hhat",
    "validate_utility",
    "validate_conditions",
]


def _match(template, value):
    """Return value as a float if template was scalar, else as the ndarray."""
    if np.ndim(template) == 0:
        return float(value)
    return value


@dataclass(frozen=True)
class MarketParams:
    """Price-dynamics coefficients.

    The unimpacted log price follows dX = -mu dr + sigma dB, so the price
    mean decays at the risk-adjusted rate mu_tilde = mu - sigma**2 / 2:
    E[S_r] = s0 * exp(-mu_tilde * r).

    Parameters
    ----------
    mu : float
        Drift magnitude per unit time, >= 0.
    sigma : float
        Volatility per sqrt time, >= 0.
    s0 : float
        Initial security price, > 0.
    """

    mu: float
    sigma: float
    s0: float = 1.0

    def __post_init__(self) -> None:
        if self.mu < 0:
            raise ValueError(f"mu must be >= 0, got {self.mu}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if not self.s0 > 0:
            raise ValueError(f"s0 must be > 0, got {self.s0}")

    @property
    def mu_tilde(self) -> float:
        # Recomputed on access so it can never drift out of sync with mu, sigma.
        return self.mu - 0.5 * self.sigma**2


class ImpactKind(str, Enum):
    LINEAR = "linear"
    QUADRATIC = "quadratic"


@dataclass(frozen=True)
class ImpactModel:
    """Deterministic part of the impact: block form g_n, rate form h, integral g.

    Linear:    g_n(psi) = alpha0*psi,      h(zeta) = alpha0,        g(zeta) = alpha0*zeta
    Quadratic: g_n(psi) = n*alpha0*psi**2, h(zeta) = 2*alpha0*zeta, g(zeta) = alpha0*zeta**2

    In both kinds g(zeta) = integral of h from 0 to zeta and the block/rate
    forms are consistent: d/dpsi g_n(psi) = h(n*psi) identically.
    alpha0 = 0 is the frictionless edge case and is accepted.
    """

    kind: ImpactKind
    alpha0: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ImpactKind(self.kind))
        if self.alpha0 < 0:
            raise ValueError(f"alpha0 must be >= 0, got {self.alpha0}")

    def g_n(self, psi, n: int):
        """Per-step log-price displacement of a block psi in the n-step scheme."""
        p = np.asarray(psi, dtype=float)
        if self.kind is ImpactKind.LINEAR:
            out = self.alpha0 * p
        else:
            out = n * self.alpha0 * p * p
        return _match(psi, out)

    def h(self, zeta):
        """Marginal impact of selling at rate zeta."""
        z = np.asarray(zeta, dtype=float)
        if self.kind is ImpactKind.LINEAR:
            out = np.full_like(z, self.alpha0)
        else:
            out = 2.0 * self.alpha0 * z
        return _match(zeta, out)

    def g(self, zeta):
        """Integrated impact g(zeta) = int_0^zeta h."""
        z = np.asarray(zeta, dtype=float)
        if self.kind is ImpactKind.LINEAR:
            out = self.alpha0 * z
        else:
            out = self.alpha0 * z * z
        return _match(zeta, out)

    def h_infinity(self) -> float:
        """sup of h; finite only for the linear kind."""
        return self.alpha0 if self.kind is ImpactKind.LINEAR else math.inf


@dataclass(frozen=True)
class NoiseModel:
    """Gamma specification of the random impact multiplier.

    The multiplier of one step is gamma + Gamma(alpha1/n, n*beta1); over unit
    time the noise aggregates to a subordinator L with L_1 - gamma ~
    Gamma(alpha1, beta1) and Levy measure nu(dz) = (alpha1/z) e^(-z/beta1) dz.
    beta1 is a SCALE. alpha1 = 0 degenerates to the deterministic multiplier
    gamma (beta1 is then unused and may be 0).
    """

    gamma: float
    alpha1: float
    beta1: float = 0.0

    def __post_init__(self) -> None:
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.alpha1 < 0:
            raise ValueError(f"alpha1 must be >= 0, got {self.alpha1}")
        if self.beta1 < 0:
            raise ValueError(f"beta1 must be >= 0, got {self.beta1}")
        if self.alpha1 > 0 and not self.beta1 > 0:
            raise ValueError("beta1 must be > 0 when alpha1 > 0")

    @property
    def gamma_tilde(self) -> float:
        """Mean impact multiplier per unit time, gamma + alpha1*beta1."""
        return self.gamma + self.alpha1 * self.beta1

    @property
    def jump_mean(self) -> float:
        """First moment of the Levy measure, int z nu(dz) = alpha1*beta1."""
        return self.alpha1 * self.beta1

    @property
    def jump_variance(self) -> float:
        """Second moment of the Levy measure, int z^2 nu(dz) = alpha1*beta1**2."""
        return self.alpha1 * self.beta1**2

    def levy_density(self, z):
        """Density of the Levy measure, (alpha1/z) e^(-z/beta1) on z > 0."""
        zz = np.asarray(z, dtype=float)
        if np.any(zz <= 0):
            raise ValueError("levy_density is defined on z > 0")
        if self.alpha1 == 0:
            return _match(z, np.zeros_like(zz))
        return _match(z, (self.alpha1 / zz) * np.exp(-zz / self.beta1))

    def laplace_exponent(self, u):
        """gamma*u + alpha1*log(1 + beta1*u); the decay rate of E[e^(-u dL)]."""
        uu = np.asarray(u, dtype=float)
        if np.any(uu < 0):
            raise ValueError("laplace_exponent requires u >= 0")
        out = self.gamma * uu + self.alpha1 * np.log1p(self.beta1 * uu)
        return _match(u, out)


def step_decay_factor(impact: ImpactModel, noise: NoiseModel, n: int, psi):
    """Exact per-step expected impact factor E[exp(-c * g_n(psi))].

    With c = gamma + Gamma(shape alpha1/n, scale n*beta1), the Gamma Laplace
    transform gives exp(-gamma*g_n(psi)) * (1 + n*beta1*g_n(psi))**(-alpha1/n),
    which lies in (0, 1], equals exp(-gamma*g_n) when alpha1 = 0, and is
    strictly decreasing in psi while impact is active.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    p = np.asarray(psi, dtype=float)
    if np.any(p < 0):
        raise ValueError("psi must be >= 0")
    g = np.asarray(impact.g_n(p, n), dtype=float)
    out = np.exp(-noise.gamma * g) * (1.0 + n * noise.beta1 * g) ** (-(noise.alpha1 / n))
    return _match(psi, out)


def effective_impact_ghat(impact: ImpactModel, noise: NoiseModel, zeta):
    """Impact cost rate of selling at rate zeta: laplace_exponent(g(zeta)).

    This is the impact part of the value-decay rate q(zeta); the drift part
    mu_tilde is added by the evaluators.
    """
    z = np.asarray(zeta, dtype=float)
    if np.any(z < 0):
        raise ValueError("zeta must be >= 0")
    return _match(zeta, noise.laplace_exponent(impact.g(z)))


def effective_impact_hhat(impact: ImpactModel, noise: NoiseModel, zeta):
    """Derivative of effective_impact_ghat in the rate direction.

    (gamma + alpha1*beta1/(1 + beta1*g(zeta))) * h(zeta); the second factor in
    the parenthesis is int z e^(-g(zeta) z) nu(dz) in closed form.
    """
    z = np.asarray(zeta, dtype=float)
    if np.any(z < 0):
        raise ValueError("zeta must be >= 0")
    g = np.asarray(impact.g(z), dtype=float)
    jump = noise.alpha1 * noise.beta1 / (1.0 + noise.beta1 * g) if noise.alpha1 > 0 else 0.0
    out = (noise.gamma + jump) * np.asarray(impact.h(z), dtype=float)
    return _match(zeta, out)


@dataclass(frozen=True)
class UtilityFn:
    """Terminal utility u(w, phi, s), nondecreasing and nonnegative on its domain.

    c_u and m_u are the growth-bound constants u <= c_u*(1 + |w|^m_u + s^m_u),
    used only by validate_utility.
    """

    fn: Callable[[float, float, float], float]
    c_u: float = 1.0
    m_u: float = 1.0

    def __call__(self, w, phi, s):
        return self.fn(w, phi, s)


#: Risk-neutral utility u(w, phi, s) = w: the trader maximizes expected cash.
RISK_NEUTRAL = UtilityFn(lambda w, phi, s: w)


def validate_utility(
    u: UtilityFn,
    w_grid: Sequence[float] = (0.0, 0.5, 1.0, 2.0, 10.0),
    phi_grid: Sequence[float] = (0.0, 0.5, 1.0, 10.0),
    s_grid: Sequence[float] = (0.0, 0.5, 1.0, 5.0),
) -> None:
    """Check nonnegativity, monotonicity, and the growth bound on sample grids.

    Raises ValueError naming the violated property. Grid-sampled, so a pass is
    necessary, not sufficient.
    """
    W, P, S = np.meshgrid(w_grid, phi_grid, s_grid, indexing="ij")
    vals = np.vectorize(u.fn)(W, P, S).astype(float)
    if np.any(vals < 0):
        raise ValueError("utility must be nonnegative on its domain")
    if np.any(np.diff(vals, axis=0) < 0):
        raise ValueError("utility must be nondecreasing in w")
    if np.any(np.diff(vals, axis=1) < 0):
        raise ValueError("utility must be nondecreasing in phi")
    if np.any(np.diff(vals, axis=2) < 0):
        raise ValueError("utility must be nondecreasing in s")
    bound = u.c_u * (1.0 + np.abs(W) ** u.m_u + S**u.m_u)
    if np.any(vals > bound + 1e-12):
        raise ValueError("utility violates its declared growth bound")


@dataclass(frozen=True)
class ConditionsReport:
    """Outcome of the model-consistency checks.

    b1_ok: the scaled impact h(x/gamma_n)/n vanishes (constant gamma_n = gamma).
    c_ok: Levy-measure moments finite; moment1 = alpha1*beta1, moment2 = alpha1*beta1**2.
    d_ok: gamma >= alpha1*beta1/8 (sufficient condition for the deterministic
          reduction of the quadratic risk-neutral problem; not necessary).
    b1_table / scaling_table: diagnostic decay tables over an n-sequence; the
    scaling table uses the reference scheme gamma_n = n**-(1/p - delta).
    """

    b1_ok: bool
    b1_table: tuple
    c_ok: bool
    moment1: float
    moment2: float
    d_ok: bool
    d_lhs: float
    d_rhs: float
    scaling_table: tuple

    def all_ok(self) -> bool:
        return self.b1_ok and self.c_ok and self.d_ok


def validate_conditions(
    market: MarketParams,
    impact: ImpactModel,
    noise: NoiseModel,
    n: int,
    n_sequence: Sequence[int] = (10, 100, 1000, 10000),
    x_probe: float = 1.0,
    delta: float = 0.05,
) -> ConditionsReport:
    """Report-only check of the standing model conditions at these parameters.

    Never raises; callers decide what to do with failures (the solver warns on
    a d_ok failure in the random quadratic mode).
    """
    del market, n  # conditions constrain impact/noise only; kept for call-site clarity
    if noise.gamma > 0:
        b1_table = tuple((m, impact.h(x_probe / noise.gamma) / m) for m in n_sequence)
        b1_ok = b1_table[-1][1] < b1_table[0][1] or b1_table[-1][1] == 0.0
    else:
        # gamma = 0 leaves no room to damp the argument; only bounded h survives.
        b1_ok = impact.h_infinity() < math.inf
        b1_table = tuple((m, impact.h_infinity() / m) for m in n_sequence)

    moment1 = noise.jump_mean
    moment2 = noise.jump_variance
    c_ok = math.isfinite(moment1 + moment2)

    d_lhs = noise.gamma
    d_rhs = noise.alpha1 * noise.beta1 / 8.0
    d_ok = d_lhs >= d_rhs

    p = 1.0 if impact.kind is ImpactKind.LINEAR else 2.0
    scaling_table = tuple(
        (m, impact.h(x_probe * m ** (1.0 / p - delta)) / m) for m in n_sequence
    )

    return ConditionsReport(
        b1_ok=b1_ok,
        b1_table=b1_table,
        c_ok=c_ok,
        moment1=moment1,
        moment2=moment2,
        d_ok=d_ok,
        d_lhs=d_lhs,
        d_rhs=d_rhs,
        scaling_table=scaling_table,
    )
