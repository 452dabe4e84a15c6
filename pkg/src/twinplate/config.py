"""Experiment configuration: strict TOML parsing and system builders.

The grammar is TOML with a flat top level (n, d, c, seed) and the sections
[damping], [sweep], [evolve], [abstract], [output]; see the README for the
full key table.  Parsing is strict: unknown keys and type mismatches are
rejected with the offending key named, so a typo cannot silently fall back
to a default.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import damping as _damping
from .errors import ConfigError
from .generator import CoupledGenerator, EnergyForm, assemble_generator
from .mesh import Grid, build_grid_1d

__all__ = [
    "DampingSection",
    "SweepSection",
    "EvolveSection",
    "AbstractSection",
    "OutputSection",
    "ExperimentConfig",
    "parse_config",
    "parse_config_text",
    "config_to_dict",
    "config_hash",
    "build_grid",
    "build_profile",
    "build_system",
]


@dataclass(frozen=True)
class DampingSection:
    kind: str = "indicator"
    omega: tuple = ()          # empty -> the named preset below
    preset: str = "right-collar"
    a0: float = 1.0
    tau: float = 0.15

    def support(self):
        return self.omega if self.omega else _damping.gc_preset_1d(self.preset)


@dataclass(frozen=True)
class SweepSection:
    lambda_min: float = 1e2
    lambda_max: float = 1e5
    points: int = 48
    fit_band: tuple[float, float] | None = None


@dataclass(frozen=True)
class EvolveSection:
    horizon: float = 10.0
    dt: float = 0.0            # 0 -> automatic from the excited modes
    n_modes: int = 5
    track_split: bool | None = None


@dataclass(frozen=True)
class AbstractSection:
    a: float = 1.0
    b: float = 2.0
    gamma: float = 1.0
    thetas: tuple[float, ...] = (0.5, 0.25, 0.75, -0.5)
    lambda_min: float = 1e2
    lambda_max: float = 1e6
    points: int = 40


@dataclass(frozen=True)
class OutputSection:
    figures: bool = True


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 200
    d: float = 1.0
    c: float = 2.0
    seed: int = 0
    damping: DampingSection = field(default_factory=DampingSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    evolve: EvolveSection = field(default_factory=EvolveSection)
    abstract: AbstractSection = field(default_factory=AbstractSection)
    output: OutputSection = field(default_factory=OutputSection)


class _Table:
    """One TOML table with strict key accounting."""

    def __init__(self, data: dict, prefix: str = ""):
        if not isinstance(data, dict):
            raise ConfigError(f"section {prefix.rstrip('.') or '<root>'} must be a table")
        self.data = dict(data)
        self.prefix = prefix

    def take(self, key, kind, default, check=None, describe=""):
        path = f"{self.prefix}{key}"
        if key not in self.data:
            return default
        value = self.data.pop(key)
        if isinstance(value, bool) and kind is not bool:
            raise ConfigError(f"key {path!r} must be of type {kind.__name__}, got a boolean")
        if kind is float and isinstance(value, int):
            value = float(value)
        if not isinstance(value, kind):
            raise ConfigError(
                f"key {path!r} must be of type {kind.__name__}, got {type(value).__name__}"
            )
        if check is not None and not check(value):
            raise ConfigError(f"key {path!r} violates constraint: {describe} (got {value!r})")
        return value

    def subtable(self, key) -> "_Table":
        return _Table(self.data.pop(key, {}), prefix=f"{key}.")

    def finish(self):
        if self.data:
            stray = f"{self.prefix}{next(iter(self.data))}"
            raise ConfigError(f"unknown key {stray!r}")


def _parse_omega(raw, path: str):
    if raw is None:
        return ()
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"key {path!r} must be a nonempty list")
    if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw):
        if len(raw) != 2:
            raise ConfigError(f"key {path!r} must be a pair [lo, hi]")
        return (float(raw[0]), float(raw[1]))
    pairs = []
    for item in raw:
        if not (isinstance(item, list) and len(item) == 2):
            raise ConfigError(f"key {path!r} must hold pairs [lo, hi]")
        pairs.append((float(item[0]), float(item[1])))
    return tuple(pairs)


def _parse_band(raw, path: str):
    if raw is None:
        return None
    if not (isinstance(raw, list) and len(raw) == 2):
        raise ConfigError(f"key {path!r} must be a pair [lo, hi]")
    lo, hi = float(raw[0]), float(raw[1])
    if not 0 < lo < hi:
        raise ConfigError(f"key {path!r} needs 0 < lo < hi, got [{lo}, {hi}]")
    return (lo, hi)


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse and validate a configuration given as TOML text."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"not valid TOML: {exc}") from None
    root = _Table(raw)

    n = root.take("n", int, 200, lambda v: v >= 3, "n >= 3")
    d = root.take("d", float, 1.0, lambda v: v > 0, "d > 0")
    c = root.take("c", float, 2.0, lambda v: v > 0, "c > 0")
    seed = root.take("seed", int, 0, lambda v: v >= 0, "seed >= 0")

    damp = root.subtable("damping")
    kind = damp.take("kind", str, "indicator",
                     lambda v: v in ("none", "indicator", "smooth"),
                     "kind in {none, indicator, smooth}")
    omega_raw = damp.take("omega", list, None)
    omega = _parse_omega(omega_raw, "damping.omega") if omega_raw is not None else ()
    preset = damp.take("preset", str, "right-collar",
                       lambda v: v in ("right-collar", "both-collars", "full"),
                       "preset in {right-collar, both-collars, full}")
    a0 = damp.take("a0", float, 1.0, lambda v: v > 0, "a0 > 0")
    tau = damp.take("tau", float, 0.15, lambda v: v > 0, "tau > 0")
    damp.finish()

    swp = root.subtable("sweep")
    sweep_sec = SweepSection(
        lambda_min=swp.take("lambda_min", float, 1e2, lambda v: v > 0, "lambda_min > 0"),
        lambda_max=swp.take("lambda_max", float, 1e5, lambda v: v > 0, "lambda_max > 0"),
        points=swp.take("points", int, 48, lambda v: v >= 8, "points >= 8"),
        fit_band=_parse_band(swp.take("fit_band", list, None), "sweep.fit_band"),
    )
    if sweep_sec.lambda_min >= sweep_sec.lambda_max:
        raise ConfigError("key 'sweep.lambda_min' must be below 'sweep.lambda_max'")
    swp.finish()

    evo = root.subtable("evolve")
    evolve_sec = EvolveSection(
        horizon=evo.take("T", float, 10.0, lambda v: v > 0, "T > 0"),
        dt=evo.take("dt", float, 0.0, lambda v: v >= 0, "dt >= 0"),
        n_modes=evo.take("n_modes", int, 5, lambda v: v >= 1, "n_modes >= 1"),
        track_split=evo.take("track_split", bool, None),
    )
    evo.finish()

    ab = root.subtable("abstract")
    thetas_raw = ab.take("thetas", list, [0.5, 0.25, 0.75, -0.5])
    try:
        thetas = tuple(float(t) for t in thetas_raw)
    except (TypeError, ValueError):
        raise ConfigError("key 'abstract.thetas' must be a list of numbers") from None
    abstract_sec = AbstractSection(
        a=ab.take("a", float, 1.0, lambda v: v > 0, "a > 0"),
        b=ab.take("b", float, 2.0, lambda v: v > 0, "b > 0"),
        gamma=ab.take("gamma", float, 1.0, lambda v: v > 0, "gamma > 0"),
        thetas=thetas,
        lambda_min=ab.take("lambda_min", float, 1e2, lambda v: v > 0, "lambda_min > 0"),
        lambda_max=ab.take("lambda_max", float, 1e6, lambda v: v > 0, "lambda_max > 0"),
        points=ab.take("points", int, 40, lambda v: v >= 8, "points >= 8"),
    )
    if not all(-1.0 <= t <= 1.0 for t in thetas):
        raise ConfigError("key 'abstract.thetas' entries must lie in [-1, 1]")
    ab.finish()

    out = root.subtable("output")
    output_sec = OutputSection(figures=out.take("figures", bool, True))
    out.finish()

    root.finish()
    return ExperimentConfig(
        n=n, d=d, c=c, seed=seed,
        damping=DampingSection(kind=kind, omega=omega, preset=preset, a0=a0, tau=tau),
        sweep=sweep_sec, evolve=evolve_sec, abstract=abstract_sec, output=output_sec,
    )


def parse_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate a TOML configuration file."""
    return parse_config_text(Path(path).read_text())


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Plain-dict echo of a configuration (JSON-ready)."""
    return asdict(cfg)


def config_hash(cfg: ExperimentConfig) -> str:
    """Stable hash identifying the configuration in every report."""
    canon = json.dumps(config_to_dict(cfg), sort_keys=True)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def build_grid(cfg: ExperimentConfig) -> Grid:
    return build_grid_1d(cfg.n)


def build_profile(cfg: ExperimentConfig, grid: Grid):
    sec = cfg.damping
    if sec.kind == "none":
        return _damping.zero_profile(grid)
    if sec.kind == "indicator":
        return _damping.indicator_profile(sec.support(), sec.a0, grid)
    return _damping.smooth_bump_profile(sec.support(), sec.a0, sec.tau, grid)


def build_system(cfg: ExperimentConfig) -> tuple[CoupledGenerator, EnergyForm]:
    grid = build_grid(cfg)
    profile = build_profile(cfg, grid)
    return assemble_generator(grid, cfg.d, cfg.c, profile)
