"""Single-file INI configuration for a complete liquidation problem.

Sections and keys are normative:

    [market]            [impact]          [noise]              [problem]
    mu = 0.055          kind = quadratic  gamma = 1.0          t = 1.0
    sigma = 0.1         alpha0 = 0.01     alpha1 = 1.0         n = 500
    s0 = 1.0                              beta1 = 2.0          phi0 = 1.0
                                                               grid_points = 1000

``s0``, ``beta1`` and ``grid_points`` are optional; everything else is
required. Validation failures raise ``ConfigError`` naming the section and
key, which the CLI maps to exit code 2.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .models import ImpactKind, ImpactModel, MarketParams, NoiseModel
from .solver import SolveMode, SolveSpec, default_grid_points

__all__ = ["ConfigError", "ProblemConfig", "load_config", "parse_config"]


class ConfigError(ValueError):
    """Malformed or invalid configuration; message names section and key."""


@dataclass(frozen=True)
class ProblemConfig:
    """Parsed problem description plus the raw text it came from."""

    market: MarketParams
    impact: ImpactModel
    noise: NoiseModel
    t: float
    n: int
    phi0: float
    grid_points: int | None
    source_text: str

    def resolved_grid_points(self) -> int:
        if self.grid_points is not None:
            return self.grid_points
        return default_grid_points(self.phi0)

    def solve_spec(self, mode: SolveMode = SolveMode.RANDOM) -> SolveSpec:
        try:
            return SolveSpec.from_problem(
                self.market,
                self.impact,
                self.noise,
                self.t,
                self.n,
                self.phi0,
                self.resolved_grid_points(),
                mode,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def _get_float(cp: configparser.ConfigParser, section: str, key: str, default=None):
    if not cp.has_option(section, key):
        if default is not None:
            return default
        raise ConfigError(f"missing key [{section}] {key}")
    raw = cp.get(section, key)
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a number") from exc


def _get_int(cp: configparser.ConfigParser, section: str, key: str, default=None):
    if not cp.has_option(section, key):
        if default is not None:
            return default
        raise ConfigError(f"missing key [{section}] {key}")
    raw = cp.get(section, key)
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not an integer") from exc


def parse_config(text: str) -> ProblemConfig:
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc

    for section in ("market", "impact", "noise", "problem"):
        if not cp.has_section(section):
            raise ConfigError(f"missing section [{section}]")

    try:
        market = MarketParams(
            mu=_get_float(cp, "market", "mu"),
            sigma=_get_float(cp, "market", "sigma"),
            s0=_get_float(cp, "market", "s0", default=1.0),
        )
    except ValueError as exc:
        raise ConfigError(f"[market] {exc}") from exc

    kind_raw = cp.get("impact", "kind", fallback=None)
    if kind_raw is None:
        raise ConfigError("missing key [impact] kind")
    try:
        kind = ImpactKind(kind_raw.strip().lower())
    except ValueError as exc:
        raise ConfigError(
            f"[impact] kind = {kind_raw!r}; expected 'linear' or 'quadratic'"
        ) from exc
    try:
        impact = ImpactModel(kind, _get_float(cp, "impact", "alpha0"))
    except ValueError as exc:
        raise ConfigError(f"[impact] {exc}") from exc

    try:
        noise = NoiseModel(
            gamma=_get_float(cp, "noise", "gamma"),
            alpha1=_get_float(cp, "noise", "alpha1"),
            beta1=_get_float(cp, "noise", "beta1", default=0.0),
        )
    except ValueError as exc:
        raise ConfigError(f"[noise] {exc}") from exc

    t = _get_float(cp, "problem", "t")
    n = _get_int(cp, "problem", "n")
    phi0 = _get_float(cp, "problem", "phi0")
    grid_points = (
        _get_int(cp, "problem", "grid_points")
        if cp.has_option("problem", "grid_points")
        else None
    )
    if not 0 < t <= 1:
        raise ConfigError(f"[problem] t = {t} must lie in (0, 1]")
    if n < 1:
        raise ConfigError(f"[problem] n = {n} must be >= 1")
    if phi0 <= 0:
        raise ConfigError(f"[problem] phi0 = {phi0} must be positive")
    if grid_points is not None and grid_points < 1:
        raise ConfigError(f"[problem] grid_points = {grid_points} must be >= 1")

    return ProblemConfig(market, impact, noise, t, n, phi0, grid_points, text)


def load_config(path: str | Path) -> ProblemConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {p}: {exc}") from exc
    return parse_config(text)
