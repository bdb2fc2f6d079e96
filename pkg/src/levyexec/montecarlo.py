"""Strategy-value oracles independent of the dynamic-programming solver.

Three routes to the same quantities:

* ``evaluate_rate_analytic``: exact expected proceeds of an absolutely
  continuous strategy, by per-piece integration of the decay exponent.
* ``simulate_discrete`` / ``simulate_continuous``: Monte Carlo on the
  block dynamics and on the Levy-driven price SDE, for general utilities.
* ``j_operator``: the instantaneous-block value reached in the vanishing
  horizon limit when block trades have bounded impact.

The simulators draw one independent substream per path from the master
seed, so estimates are bit-reproducible for a fixed ``McConfig``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .models import ImpactModel, MarketParams, NoiseModel, UtilityFn, RISK_NEUTRAL
from .schedules import DiscreteSchedule, RateSchedule

__all__ = [
    "PathState",
    "McConfig",
    "evaluate_rate_analytic",
    "simulate_discrete",
    "simulate_continuous",
    "trace_discrete",
    "trace_continuous",
    "draw_levy_increments",
    "j_operator",
]


@dataclass(frozen=True)
class PathState:
    """Snapshot of one simulated path: cash, inventory and the price pair.

    ``s == exp(x)`` whenever the initial price is positive; a zero initial
    price propagates as ``s == 0`` with ``x`` pinned at ``-inf``.
    """

    r: float
    x: float
    s: float
    w: float
    phi: float

    @classmethod
    def initial(cls, w: float, phi: float, s: float) -> "PathState":
        if s < 0:
            raise ValueError("initial price must be nonnegative")
        x = math.log(s) if s > 0 else -math.inf
        return cls(r=0.0, x=x, s=float(s), w=float(w), phi=float(phi))


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo run shape. ``time_steps`` only matters for the SDE route."""

    paths: int
    time_steps: int = 1000
    seed: int = 0
    antithetic: bool = False

    def __post_init__(self) -> None:
        if self.paths < 1:
            raise ValueError("paths must be >= 1")
        if self.time_steps < 1:
            raise ValueError("time_steps must be >= 1")
        if self.antithetic and self.paths % 2 != 0:
            raise ValueError("antithetic pairing needs an even path count")


# ---------------------------------------------------------------------------
# exact evaluator for rate schedules
# ---------------------------------------------------------------------------

def evaluate_rate_analytic(
    sched: RateSchedule,
    market: MarketParams,
    impact: ImpactModel,
    noise: NoiseModel,
    *,
    w: float = 0.0,
    s: float | None = None,
) -> float:
    """Expected proceeds of a piecewise-constant rate strategy, in closed form.

    E[W_T] = w + s * integral of zeta_r * exp(-mu_tilde*r - int_0^r Psi(g(zeta_v)) dv).
    The exponent rate q = mu_tilde + Psi(g(zeta)) is constant on each piece
    (for either impact kind), so every piece integrates exactly.
    """
    if s is None:
        s = market.s0
    total = 0.0
    exponent = 0.0  # accumulated q * piece-length over earlier pieces
    bp = sched.breakpoints
    for i, zeta in enumerate(sched.rates):
        length = bp[i + 1] - bp[i]
        q = market.mu_tilde + float(noise.laplace_exponent(impact.g(zeta)))
        if zeta > 0.0:
            if q != 0.0:
                piece = zeta * math.exp(-exponent) * (-math.expm1(-q * length)) / q
            else:
                piece = zeta * math.exp(-exponent) * length
            total += piece
        exponent += q * length
    return w + s * total


# ---------------------------------------------------------------------------
# Levy increments
# ---------------------------------------------------------------------------

def draw_levy_increments(
    rng: np.random.Generator, noise: NoiseModel, dt: float, size: int
) -> np.ndarray:
    """Increments of L over steps of length dt: gamma*dt plus an exact Gamma draw.

    Shapes alpha1*dt far below 1 are routine here, so sampling must stay exact
    rather than moment-matched.
    """
    jumps = rng.gamma(shape=noise.alpha1 * dt, scale=noise.beta1, size=size)
    return noise.gamma * dt + jumps


# ---------------------------------------------------------------------------
# discrete-dynamics simulation
# ---------------------------------------------------------------------------

def _discrete_values(z, jumps, sched, market, impact, noise, w, s, baseline):
    """Terminal (W, phi, S) for one path given its Gaussian and jump draws."""
    n = sched.n
    psi = np.asarray(sched.blocks)
    k = psi.size
    if baseline:
        c = np.full(k, noise.gamma_tilde)
    else:
        c = noise.gamma + jumps
    shift = c * impact.g_n(psi, n)

    if s > 0.0:
        dx_noise = -market.mu / n + market.sigma * math.sqrt(1.0 / n) * z
        # log price just before the trade at step l: all earlier noise and impact
        pre = np.empty(k)
        pre[0] = 0.0
        np.cumsum(dx_noise[:-1] - shift[:-1], out=pre[1:])
        pre += math.log(s)
        proceeds = psi * np.exp(pre - shift)
        w_term = w + float(np.sum(proceeds))
        s_term = math.exp(pre[-1] + dx_noise[-1] - shift[-1])
    else:
        w_term = w
        s_term = 0.0
    return w_term, sched.phi0 - float(np.sum(psi)), s_term


def simulate_discrete(
    sched: DiscreteSchedule,
    market: MarketParams,
    impact: ImpactModel,
    noise: NoiseModel,
    mc: McConfig,
    u: UtilityFn = RISK_NEUTRAL,
    *,
    w: float = 0.0,
    s: float | None = None,
    baseline: bool = False,
) -> tuple[float, float]:
    """Monte Carlo estimate of E[u(W_k, phi_k, S_k)] under the block dynamics.

    ``baseline`` replaces every impact draw by its mean gamma_tilde while
    consuming the identical Gaussian stream, so random and baseline runs are
    seed-matched.
    """
    if s is None:
        s = market.s0
    k = sched.k
    if k == 0:
        return float(u(w, sched.phi0, s)), 0.0

    n = sched.n
    gamma_shape = noise.alpha1 / n
    gamma_scale = n * noise.beta1

    def one(rng: np.random.Generator, flip: float) -> float:
        # draw order is fixed (gaussians then jumps) so baseline runs and
        # antithetic partners see the same gaussian stream
        z = flip * rng.standard_normal(k)
        jumps = rng.gamma(shape=gamma_shape, scale=gamma_scale, size=k)
        wt, pt, st = _discrete_values(z, jumps, sched, market, impact, noise, w, s, baseline)
        return float(u(wt, pt, st))

    return _run_paths(one, mc)


# ---------------------------------------------------------------------------
# continuous-dynamics simulation
# ---------------------------------------------------------------------------

def simulate_continuous(
    sched: RateSchedule,
    market: MarketParams,
    impact: ImpactModel,
    noise: NoiseModel,
    mc: McConfig,
    u: UtilityFn = RISK_NEUTRAL,
    *,
    w: float = 0.0,
    s: float | None = None,
    phi0: float | None = None,
    b_fn: Callable[[np.ndarray], np.ndarray] | None = None,
    sigma_fn: Callable[[np.ndarray], np.ndarray] | None = None,
) -> tuple[float, float]:
    """Euler estimate of E[u(W_T, phi_T, S_T)] for the rate-driven price SDE.

    With the default constant coefficients the log-price step is sampled
    exactly; the only bias left is the left-endpoint rule in the cash
    integral. ``b_fn``/``sigma_fn`` switch on state-dependent coefficients
    (drift and volatility of the log price as functions of the log price),
    at the cost of O(dt) weak error.
    """
    if s is None:
        s = market.s0
    if phi0 is None:
        phi0 = sched.integral()
    pieces = len(sched.rates)
    if mc.time_steps < pieces:
        raise ValueError(
            f"time_steps={mc.time_steps} cannot resolve {pieces} schedule pieces"
        )
    horizon = sched.horizon
    m = mc.time_steps
    dt = horizon / m
    times = np.arange(m) * dt
    zeta = np.array([sched.rate_at(t) for t in times])
    g_zeta = impact.g(zeta)
    sqrt_dt = math.sqrt(dt)
    constant = b_fn is None and sigma_fn is None
    phi_term = phi0 - float(np.sum(zeta) * dt)

    def one(rng: np.random.Generator, flip: float) -> float:
        z = flip * rng.standard_normal(m)
        dl = draw_levy_increments(rng, noise, dt, m)
        if s <= 0.0:
            return float(u(w, phi_term, 0.0))
        if constant:
            dx = -market.mu * dt + market.sigma * sqrt_dt * z - g_zeta * dl
            x = np.empty(m + 1)
            x[0] = math.log(s)
            np.cumsum(dx, out=x[1:])
            x[1:] += x[0]
        else:
            bf = b_fn if b_fn is not None else (lambda xv: -market.mu)
            sf = sigma_fn if sigma_fn is not None else (lambda xv: market.sigma)
            x = np.empty(m + 1)
            x[0] = math.log(s)
            for i in range(m):
                x[i + 1] = x[i] + bf(x[i]) * dt + sf(x[i]) * sqrt_dt * z[i] - g_zeta[i] * dl[i]
        w_term = w + float(np.sum(zeta * np.exp(x[:-1]))) * dt
        return float(u(w_term, phi_term, math.exp(x[-1])))

    return _run_paths(one, mc)


def _run_paths(one: Callable[[np.random.Generator, float], float], mc: McConfig):
    """Drive per-path substreams and reduce to (estimate, standard error)."""
    if mc.antithetic:
        half = mc.paths // 2
        children = np.random.SeedSequence(mc.seed).spawn(half)
        samples = np.empty(half)
        for p, child in enumerate(children):
            rng = np.random.Generator(np.random.PCG64(child))
            state = rng.bit_generator.state
            plus = one(rng, 1.0)
            rng.bit_generator.state = state  # partner reuses the jump draws too
            minus = one(rng, -1.0)
            samples[p] = 0.5 * (plus + minus)
    else:
        children = np.random.SeedSequence(mc.seed).spawn(mc.paths)
        samples = np.empty(mc.paths)
        for p, child in enumerate(children):
            rng = np.random.Generator(np.random.PCG64(child))
            samples[p] = one(rng, 1.0)
    est = float(np.mean(samples))
    if samples.size > 1:
        se = float(np.std(samples, ddof=1) / math.sqrt(samples.size))
    else:
        se = 0.0
    return est, se


# ---------------------------------------------------------------------------
# single-path reference traces
# ---------------------------------------------------------------------------

def trace_discrete(
    sched: DiscreteSchedule,
    market: MarketParams,
    impact: ImpactModel,
    noise: NoiseModel,
    rng: np.random.Generator,
    *,
    w: float = 0.0,
    s: float | None = None,
) -> list[PathState]:
    """One explicit path of the block dynamics, state by state.

    Draws in the same order as ``simulate_discrete`` (gaussian vector, then
    jump vector), so a generator seeded like path 0 reproduces it exactly.
    """
    if s is None:
        s = market.s0
    n = sched.n
    k = sched.k
    z = rng.standard_normal(k)
    jumps = rng.gamma(shape=noise.alpha1 / n, scale=n * noise.beta1, size=k)
    states = [PathState.initial(w, sched.phi0, s)]
    cur = states[0]
    for l in range(k):
        psi = sched.blocks[l]
        shift = (noise.gamma + jumps[l]) * impact.g_n(psi, n)
        w_next = cur.w + psi * cur.s * math.exp(-shift)
        x_next = cur.x - shift - market.mu / n + market.sigma * math.sqrt(1.0 / n) * z[l]
        cur = PathState(
            r=(l + 1) / n,
            x=x_next,
            s=math.exp(x_next) if s > 0 else 0.0,
            w=w_next,
            phi=cur.phi - psi,
        )
        states.append(cur)
    return states


def trace_continuous(
    sched: RateSchedule,
    market: MarketParams,
    impact: ImpactModel,
    noise: NoiseModel,
    rng: np.random.Generator,
    time_steps: int,
    *,
    w: float = 0.0,
    s: float | None = None,
    phi0: float | None = None,
) -> list[PathState]:
    """One explicit Euler path of the rate-driven SDE (constant coefficients)."""
    if s is None:
        s = market.s0
    if phi0 is None:
        phi0 = sched.integral()
    m = time_steps
    dt = sched.horizon / m
    z = rng.standard_normal(m)
    dl = draw_levy_increments(rng, noise, dt, m)
    states = [PathState.initial(w, phi0, s)]
    cur = states[0]
    for i in range(m):
        zeta = sched.rate_at(i * dt)
        w_next = cur.w + zeta * cur.s * dt
        x_next = cur.x - market.mu * dt + market.sigma * math.sqrt(dt) * z[i] - impact.g(zeta) * dl[i]
        cur = PathState(
            r=(i + 1) * dt,
            x=x_next,
            s=math.exp(x_next) if s > 0 else 0.0,
            w=w_next,
            phi=cur.phi - zeta * dt,
        )
        states.append(cur)
    return states


# ---------------------------------------------------------------------------
# instantaneous-block value
# ---------------------------------------------------------------------------

def j_operator(
    u: UtilityFn,
    gamma_h_inf: float,
    w: float,
    phi: float,
    s: float,
    *,
    grid_nodes: int = 4001,
) -> float:
    """Best value reachable by one instantaneous block trade of size in [0, phi].

    ``gamma_h_inf`` is gamma * h(infinity). When that limit is infinite
    (superlinear block impact) the operator is undefined and the vanishing
    horizon loses nothing, so we refuse with an explanatory signal.
    """
    if math.isinf(gamma_h_inf):
        raise ValueError(
            "instantaneous blocks have unbounded impact (gamma*h(inf) = inf); "
            "no block operator applies and the small-horizon value is continuous"
        )
    if gamma_h_inf < 0:
        raise ValueError("gamma*h(inf) must be nonnegative")
    if phi < 0:
        raise ValueError("phi must be nonnegative")

    a = gamma_h_inf
    if a == 0.0:

        def objective(psi: float) -> float:
            return float(u(w + psi * s, phi - psi, s))

    else:

        def objective(psi: float) -> float:
            lost = math.exp(-a * psi)
            return float(u(w + (1.0 - lost) / a * s, phi - psi, s * lost))

    if phi == 0.0:
        return objective(0.0)

    # global grid seed, then a local bounded polish; u need not be unimodal
    grid = np.linspace(0.0, phi, grid_nodes)
    vals = np.array([objective(p) for p in grid])
    i = int(np.argmax(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid_nodes - 1)]
    res = optimize.minimize_scalar(
        lambda p: -objective(p), bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-12},
    )
    return max(float(vals[i]), float(-res.fun))
