"""Full-size acceptance checks.

Every advertised guarantee of the package runs here at its stated tolerance
and problem size (n = 500 solves, 1e5-path Monte Carlo), one pass/fail line
per sub-case under -v.  Solves are cached at module scope so setups shared
between checks are computed once, and the stated runtime budgets are
asserted alongside the numerical tolerances.
"""

import math
import time

import numpy as np
import pytest

from levyexec.closedform import (
    fixed_gamma_tilde_params,
    loglinear_value,
    total_mi_cost,
)
from levyexec.models import (
    RISK_NEUTRAL,
    ImpactKind,
    ImpactModel,
    MarketParams,
    NoiseModel,
)
from levyexec.montecarlo import (
    McConfig,
    draw_levy_increments,
    evaluate_rate_analytic,
    j_operator,
    simulate_continuous,
    simulate_discrete,
)
from levyexec.schedules import DiscreteSchedule, RateSchedule
from levyexec.solver import (
    SolveMode,
    SolveSpec,
    convergence_sweep,
    default_grid_points,
    evaluate_discrete,
    extract_schedule,
    solve,
)

MARKET = MarketParams(mu=0.055, sigma=0.1)  # mu_tilde = 0.05
ALPHA0 = 0.01
LINEAR = ImpactModel(ImpactKind.LINEAR, alpha0=ALPHA0)
QUAD = ImpactModel(ImpactKind.QUADRATIC, alpha0=ALPHA0)
GAMMA = 1.0
BETA1 = 2.0
N = 500
ALPHAS = (0.0, 1.0, 3.0)
TILDE_ALPHAS = (0.0, 0.5, 1.0)
PHI0S = (1.0, 10.0, 100.0)

JUMP_FREE = NoiseModel(1.0, 0.0, 0.0)
UNIT_RATE = RateSchedule((0.0, 1.0), (1.0,))
MC_FULL = McConfig(paths=100_000, time_steps=1000, seed=11)

_SOLVED = {}
_TIMES = {}


def _solved(spec):
    """Solve once per distinct spec; return (surface, solve seconds)."""
    hit = _SOLVED.get(spec)
    if hit is None:
        t0 = time.perf_counter()
        surface = solve(spec)
        hit = (surface, time.perf_counter() - t0)
        surface.check_invariants()
        _SOLVED[spec] = hit
    return hit


def _fixed_gamma_noise(alpha1):
    return NoiseModel(GAMMA, alpha1, BETA1)


def _tilde_noise(alpha1):
    gamma, beta1 = fixed_gamma_tilde_params(1.0, 0.5, alpha1)
    return NoiseModel(gamma, alpha1, beta1)


def _linear_spec(alpha1, phi0, k=N, mode=SolveMode.RANDOM):
    return SolveSpec(
        market=MARKET, impact=LINEAR, noise=_fixed_gamma_noise(alpha1),
        n=N, k=k, grid_points=1000, phi_max=phi0, mode=mode,
    )


def _quad_spec(noise, phi0, mode=SolveMode.RANDOM):
    return SolveSpec(
        market=MARKET, impact=QUAD, noise=noise,
        n=N, k=N, grid_points=default_grid_points(phi0), phi_max=phi0, mode=mode,
    )


def _schedule_for(noise, phi0):
    surface, _ = _solved(_quad_spec(noise, phi0))
    return extract_schedule(surface, phi0)


# ---------------------------------------------------------------------------
# linear DP value against its known limit
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("phi0", (1.0, 10.0))
@pytest.mark.parametrize("alpha1", ALPHAS)
def test_linear_dp_value_matches_loglinear_limit(alpha1, phi0):
    surface, seconds = _solved(_linear_spec(alpha1, phi0))
    assert seconds < 10.0
    target = loglinear_value(0.0, phi0, 1.0, GAMMA, ALPHA0)
    assert surface.value() == pytest.approx(target, rel=2e-3)


# ---------------------------------------------------------------------------
# convergence in the number of trading periods
# ---------------------------------------------------------------------------

def test_linear_gap_to_limit_shrinks_with_n():
    t0 = time.perf_counter()
    base = SolveSpec(
        market=MARKET, impact=LINEAR, noise=_fixed_gamma_noise(1.0),
        n=50, k=50, grid_points=1000, phi_max=1.0,
    )
    rows = convergence_sweep(
        base, (50, 100, 200, 400),
        closed_form=loglinear_value(0.0, 1.0, 1.0, GAMMA, ALPHA0),
    )
    _TIMES["sweep_linear"] = time.perf_counter() - t0
    gaps = [r.gap_closed for r in rows]
    assert all(later < earlier for earlier, later in zip(gaps, gaps[1:]))
    assert _TIMES["sweep_linear"] + _TIMES.get("sweep_quadratic", 0.0) < 60.0


def test_quadratic_value_self_converges_in_n():
    t0 = time.perf_counter()
    base = SolveSpec(
        market=MARKET, impact=QUAD, noise=_fixed_gamma_noise(1.0),
        n=50, k=50, grid_points=100, phi_max=1.0,
    )
    # M = 2n keeps the rate-grid step n*phi0/M fixed across the sweep
    rows = convergence_sweep(base, (50, 100, 200, 400, 800),
                             grid_points_for_n=lambda n: 2 * n)
    _TIMES["sweep_quadratic"] = time.perf_counter() - t0
    gaps = [r.gap_prev for r in rows[1:]]
    assert all(later < earlier for earlier, later in zip(gaps, gaps[1:]))
    assert _TIMES["sweep_quadratic"] + _TIMES.get("sweep_linear", 0.0) < 60.0


# ---------------------------------------------------------------------------
# random impact dominates its deterministic mean-impact counterpart
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("phi0", PHI0S)
@pytest.mark.parametrize("alpha1", ALPHAS)
def test_random_impact_value_dominates_mean_impact_nodewise(alpha1, phi0):
    noise = _fixed_gamma_noise(alpha1)
    random, _ = _solved(_quad_spec(noise, phi0, SolveMode.RANDOM))
    baseline, _ = _solved(_quad_spec(noise, phi0, SolveMode.BASELINE))
    assert np.all(random.values >= baseline.values)


@pytest.mark.parametrize("phi0", PHI0S)
def test_random_and_mean_impact_coincide_without_jumps(phi0):
    noise = _fixed_gamma_noise(0.0)
    random, _ = _solved(_quad_spec(noise, phi0, SolveMode.RANDOM))
    baseline, _ = _solved(_quad_spec(noise, phi0, SolveMode.BASELINE))
    assert np.array_equal(random.values, baseline.values)


# ---------------------------------------------------------------------------
# forced-liquidation value sits between the two free horizons
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("alpha1", ALPHAS)
def test_selloff_value_sandwiched_between_horizons(alpha1):
    noise = _fixed_gamma_noise(alpha1)
    full, _ = _solved(_quad_spec(noise, 10.0, SolveMode.RANDOM))
    so, _ = _solved(_quad_spec(noise, 10.0, SolveMode.SELLOFF))
    short = full.values[450]  # horizon shortened by 0.1, i.e. 50 periods
    assert np.all(short <= so.values[500])
    assert np.all(so.values[500] <= full.values[500])


@pytest.mark.parametrize("alpha1", ALPHAS)
def test_selloff_linear_value_approaches_loglinear_limit(alpha1):
    surface, _ = _solved(_linear_spec(alpha1, 1.0, mode=SolveMode.SELLOFF))
    target = loglinear_value(0.0, 1.0, 1.0, GAMMA, ALPHA0)
    assert surface.value() == pytest.approx(target, rel=5e-3)


# ---------------------------------------------------------------------------
# three-way oracle agreement for one schedule evaluated three ways
# ---------------------------------------------------------------------------

def test_constant_rate_analytic_value_is_pinned():
    got = evaluate_rate_analytic(UNIT_RATE, MARKET, LINEAR, JUMP_FREE)
    # unit rate: q = mu_tilde + gamma*alpha0 = 0.06
    assert abs(got - (-math.expm1(-0.06) / 0.06)) <= 1e-9
    assert got == pytest.approx(0.970591, abs=5e-7)


def test_continuous_mc_agrees_with_analytic_value():
    t0 = time.perf_counter()
    est, se = simulate_continuous(UNIT_RATE, MARKET, LINEAR, JUMP_FREE, MC_FULL)
    _TIMES["mc_continuous"] = time.perf_counter() - t0
    exact = evaluate_rate_analytic(UNIT_RATE, MARKET, LINEAR, JUMP_FREE)
    assert abs(est - exact) <= 3.0 * se


def test_discrete_mc_agrees_with_exact_evaluation():
    n = 1000
    sched = DiscreteSchedule(n, (1.0 / n,) * n, 1.0)
    spec = SolveSpec(
        market=MARKET, impact=LINEAR, noise=JUMP_FREE,
        n=n, k=n, grid_points=n, phi_max=1.0,
    )
    t0 = time.perf_counter()
    est, se = simulate_discrete(sched, MARKET, LINEAR, JUMP_FREE, MC_FULL)
    _TIMES["mc_discrete"] = time.perf_counter() - t0
    assert abs(est - evaluate_discrete(sched, spec)) <= 3.0 * se


def test_oracle_cross_checks_within_runtime_budget():
    assert _TIMES.get("mc_continuous", 0.0) + _TIMES.get("mc_discrete", 0.0) < 120.0


# ---------------------------------------------------------------------------
# sampled jump increments have the right first two moments
# ---------------------------------------------------------------------------

def test_gamma_increment_sample_moments_match_formulas():
    noise = _fixed_gamma_noise(1.0)
    rng = np.random.default_rng(7)
    x = draw_levy_increments(rng, noise, 1.0, 100_000) - noise.gamma
    n = x.size
    mean_se = x.std(ddof=1) / math.sqrt(n)
    assert abs(x.mean() - noise.alpha1 * noise.beta1) <= 3.0 * mean_se
    s2 = x.var(ddof=1)
    m4 = float(np.mean((x - x.mean()) ** 4))
    var_se = math.sqrt((m4 - s2 * s2 * (n - 3) / (n - 1)) / n)
    assert abs(s2 - noise.alpha1 * noise.beta1 ** 2) <= 3.0 * var_se


# ---------------------------------------------------------------------------
# qualitative shape of the optimal schedules
# ---------------------------------------------------------------------------

def test_jump_free_optimal_rate_is_flat_then_stops_early():
    sched = _schedule_for(_fixed_gamma_noise(0.0), 1.0)
    blocks = np.asarray(sched.blocks)
    pos = np.flatnonzero(blocks > 0)
    assert pos.size > 0 and pos[-1] == pos.size - 1  # trades form a prefix
    support = blocks[: pos[-1] + 1]
    assert support.std() / support.mean() < 0.05
    assert abs(sched.phi0 - sched.total) <= 1e-9  # fully liquidated
    assert pos[-1] < N - 1  # and strictly before the horizon


def test_jumpy_rates_backload_and_retain_inventory():
    sched = _schedule_for(_fixed_gamma_noise(3.0), 10.0)
    blocks = np.asarray(sched.blocks)
    assert sched.phi0 - sched.total > 0.0
    diffs = np.diff(blocks[N // 2:])
    step = 10.0 / 1000
    violations = diffs[diffs < -1e-12]
    assert violations.size <= 1
    assert np.all(np.abs(violations) <= step + 1e-12)


def test_large_position_retention_grows_with_jump_share():
    retained = [
        s.phi0 - s.total
        for s in (_schedule_for(_fixed_gamma_noise(a1), 100.0) for a1 in ALPHAS)
    ]
    assert all(r > 0.0 for r in retained)
    assert all(later >= earlier - 1e-9
               for earlier, later in zip(retained, retained[1:]))


def test_retention_at_fixed_mean_impact_falls_with_jump_share():
    retained = [
        s.phi0 - s.total
        for s in (_schedule_for(_tilde_noise(a1), 100.0) for a1 in TILDE_ALPHAS)
    ]
    assert all(later <= earlier + 1e-9
               for earlier, later in zip(retained, retained[1:]))


@pytest.mark.parametrize("phi0", (1.0, 10.0))
def test_total_cost_at_fixed_mean_impact_falls_with_jump_share(phi0):
    tc = [
        total_mi_cost(_solved(_quad_spec(_tilde_noise(a1), phi0))[0].value(), phi0, 1.0)
        for a1 in TILDE_ALPHAS
    ]
    assert all(later <= earlier for earlier, later in zip(tc, tc[1:]))


# ---------------------------------------------------------------------------
# the linear-case value does not depend on the horizon
# ---------------------------------------------------------------------------

T_GRID = (0.25, 0.5, 1.0)


@pytest.mark.parametrize("alpha1", ALPHAS)
def test_linear_value_is_horizon_independent(alpha1):
    values = [_solved(_linear_spec(alpha1, 1.0, k=int(N * t)))[0].value()
              for t in T_GRID]
    assert max(values) <= min(values) * (1 + 5e-3)


@pytest.mark.parametrize("alpha1", ALPHAS)
def test_linear_value_matches_block_sale_limit(alpha1):
    block = j_operator(RISK_NEUTRAL, GAMMA * LINEAR.h_infinity(), 0.0, 1.0, 1.0)
    for t in T_GRID:
        value = _solved(_linear_spec(alpha1, 1.0, k=int(N * t)))[0].value()
        assert value == pytest.approx(block, rel=5e-3)
