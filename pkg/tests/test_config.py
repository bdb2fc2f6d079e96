"""Config parsing: normative keys, defaults, and error naming."""

import pytest

from levyexec.config import ConfigError, load_config, parse_config
from levyexec.models import ImpactKind
from levyexec.solver import SolveMode

GOOD = """\
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
n = 500
phi0 = 1.0
"""


def test_parse_full_config():
    cfg = parse_config(GOOD)
    assert cfg.market.mu == 0.055
    assert cfg.market.s0 == 1.0  # default
    assert cfg.impact.kind is ImpactKind.QUADRATIC
    assert cfg.noise.beta1 == 2.0
    assert cfg.grid_points is None
    assert cfg.resolved_grid_points() == 1000
    assert cfg.source_text == GOOD
    spec = cfg.solve_spec(SolveMode.SELLOFF)
    assert spec.k == 500 and spec.grid_points == 1000
    assert spec.mode is SolveMode.SELLOFF


def test_grid_points_override_and_large_phi0_default():
    cfg = parse_config(GOOD.replace("phi0 = 1.0", "phi0 = 100.0"))
    assert cfg.resolved_grid_points() == 2000
    cfg = parse_config(GOOD + "grid_points = 123\n")
    assert cfg.resolved_grid_points() == 123


@pytest.mark.parametrize(
    "mangle, fragment",
    [
        (lambda s: s.replace("[market]\nmu = 0.055\n", "[market]\n"), "[market] mu"),
        (lambda s: s.replace("kind = quadratic", "kind = cubic"), "cubic"),
        (lambda s: s.replace("alpha0 = 0.01", "alpha0 = ten"), "not a number"),
        (lambda s: s.replace("n = 500", "n = 5.5"), "not an integer"),
        (lambda s: s.replace("t = 1.0", "t = 1.5"), "t = 1.5"),
        (lambda s: s.replace("phi0 = 1.0", "phi0 = -1"), "phi0"),
        (lambda s: s.replace("gamma = 1.0", "gamma = -1"), "[noise]"),
        (lambda s: s.replace("[problem]", "[problems]"), "[problem]"),
        (lambda s: "not an ini file at all [", "cannot parse"),
    ],
)
def test_validation_errors_name_the_problem(mangle, fragment):
    with pytest.raises(ConfigError, match=None) as err:
        parse_config(mangle(GOOD))
    assert fragment in str(err.value)


def test_mu_tilde_gate_is_deferred_to_solve_spec():
    # mu_tilde <= 0 is legal for evaluators but not for the solver
    cfg = parse_config(GOOD.replace("mu = 0.055", "mu = 0.001"))
    assert cfg.market.mu_tilde < 0
    with pytest.raises(ConfigError, match="mu_tilde"):
        cfg.solve_spec()


def test_load_config_roundtrip_and_missing_file(tmp_path):
    p = tmp_path / "problem.ini"
    p.write_text(GOOD)
    assert load_config(p).n == 500
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.ini")
