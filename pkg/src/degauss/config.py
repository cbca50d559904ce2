"""Experiment configuration: flat ``key = value`` text files with ``#`` comments."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .model import ModelParams
from .sampler import RunConfig


class ConfigError(ValueError):
    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


def _unit(v):
    return 0 < v <= 1


_RULES = {
    "s": (lambda v: v >= 0, "non-negative"),
    "R": (lambda v: 0 <= v < 1, "in [0, 1)"),
    "eta_T": (_unit, "in (0, 1]"),
    "eta_H": (_unit, "in (0, 1]"),
    "eta_D": (_unit, "in (0, 1]"),
    "eta_override": (_unit, "in (0, 1]"),
    "xi": (lambda v: 0 <= v <= 1, "in [0, 1]"),
    "eta_apd": (_unit, "in (0, 1]"),
    "n_max": (lambda v: v >= 1, ">= 1"),
    "n_phases": (lambda v: v >= 2, ">= 2"),
    "pulses_per_phase": (lambda v: v >= 1, ">= 1"),
    "bins": (lambda v: v >= 2, ">= 2"),
    "filter_cutoff": (lambda v: v > 0, "positive"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    s: float = 0.43
    R: float = 0.115
    eta_T: float = 0.94
    eta_H: float = 0.92
    eta_D: float = 0.945
    # direct override of the homodyne efficiency; the factors above are then informational
    eta_override: float | None = None
    xi: float = 0.7
    eta_apd: float = 1.0
    n_max: int = 10
    n_phases: int = 6
    pulses_per_phase: int = 5000
    bins: int = 40
    x_min: float = -5.0
    x_max: float = 5.0
    seed: int = 1
    filter_cutoff: float = 6.0

    def __post_init__(self):
        for name, (ok, expected) in _RULES.items():
            value = getattr(self, name)
            if value is not None and not ok(value):
                raise ConfigError(
                    f"{_FILE_KEYS.get(name, name)} must be {expected}, got {value!r}", name
                )
        if not self.x_min < self.x_max:
            raise ConfigError(f"x_min must be below x_max, got {self.x_min} >= {self.x_max}", "x_min")
        try:
            self.model()
            self.run()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def eta_factors(self) -> float:
        """``eta_T * eta_H**2 * eta_D``."""
        return self.eta_T * self.eta_H ** 2 * self.eta_D

    @property
    def eta(self) -> float:
        return self.eta_factors if self.eta_override is None else self.eta_override

    @property
    def eta_tot(self) -> float:
        return self.eta * (1 - self.R)

    def model(self) -> ModelParams:
        return ModelParams(self.s, self.R, self.eta, self.xi, self.eta_apd, self.n_max)

    def run(self) -> RunConfig:
        return RunConfig(
            RunConfig.equally_spaced(self.n_phases),
            self.pulses_per_phase,
            self.bins,
            (self.x_min, self.x_max),
            self.seed,
        )

    def replace(self, **changes) -> ExperimentConfig:
        return dataclasses.replace(self, **changes)


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
# file key for the override; reads naturally in a config file
_KEY_ALIASES = {"eta": "eta_override"}
_FILE_KEYS = {v: k for k, v in _KEY_ALIASES.items()}


def _convert(name: str, text: str):
    kind = _FIELDS[name].type
    if "int" in kind:
        return int(text)
    return float(text)


def loads(text: str, source: str = "<config>") -> ExperimentConfig:
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        name = _KEY_ALIASES.get(key, key)
        if name not in _FIELDS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if name in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[name] = _convert(name, value)
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: bad value {value!r} for {key!r}") from None
        lines[name] = lineno
    try:
        return ExperimentConfig(**values)
    except ConfigError as exc:
        if exc.key in lines:
            raise ConfigError(f"{source}:{lines[exc.key]}: {exc}", exc.key) from None
        raise ConfigError(f"{source}: {exc}", exc.key) from None


def load(path) -> ExperimentConfig:
    path = Path(path)
    return loads(path.read_text(), str(path))


def dumps(config: ExperimentConfig) -> str:
    out = []
    for name in _FIELDS:
        value = getattr(config, name)
        if value is None:
            continue
        out.append(f"{_FILE_KEYS.get(name, name)} = {value!r}")
    return "\n".join(out) + "\n"


def save(config: ExperimentConfig, path) -> None:
    Path(path).write_text(dumps(config))
