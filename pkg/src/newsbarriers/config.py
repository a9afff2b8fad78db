"""Run configuration: one TOML file plus command-line overrides."""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .annotate import Thresholds
from .classifiers import TrainConfig
from .evaluation import Grid, ModelParams, SplitPlan
from .features import FeatureConfig


class ConfigError(ValueError):
    pass


@dataclass
class Paths:
    corpus: Path | None = None
    countries: Path | None = None
    publishers: Path | None = None
    out: Path = Path("out")


@dataclass
class RunConfig:
    paths: Paths = field(default_factory=Paths)
    thresholds: Thresholds = field(default_factory=Thresholds)
    features: FeatureConfig = field(default_factory=FeatureConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    models: ModelParams = field(default_factory=ModelParams)
    split: SplitPlan = field(default_factory=SplitPlan)
    grid: Grid = field(default_factory=Grid)
    seed: int = 42
    jobs: int = 0

    @property
    def workers(self) -> int:
        return self.jobs if self.jobs > 0 else (os.cpu_count() or 1)

    def seeded(self) -> "RunConfig":
        """Propagate :attr:`seed` into every stochastic component."""
        return replace(self, train=replace(self.train, seed=self.seed), split=replace(self.split, seed=self.seed))

    def require(self, *names: str) -> None:
        for name in names:
            p = getattr(self.paths, name)
            if p is None:
                raise ConfigError(f"no {name} path configured (set [paths] {name} or --{name})")
            if not Path(p).exists():
                raise ConfigError(f"{name} file not found: {p}")


# TOML section -> (RunConfig attribute, type)
_SECTIONS = {
    "annotation": ("thresholds", Thresholds),
    "features": ("features", FeatureConfig),
    "train": ("train", TrainConfig),
    "models": ("models", ModelParams),
    "split": ("split", SplitPlan),
    "grid": ("grid", Grid),
}
_TOP_LEVEL = {"seed", "jobs", "paths", *_SECTIONS}


def _build(cls, values: dict, section: str):
    allowed = {f.name for f in fields(cls)} - {"seed"}
    unknown = set(values) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")
    values = {k: tuple(v) if isinstance(v, list) else v for k, v in values.items()}
    try:
        return cls(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}]: {exc}") from exc


def from_dict(doc: dict, base_dir: Path = Path(".")) -> RunConfig:
    unknown = set(doc) - _TOP_LEVEL
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {', '.join(sorted(unknown))}")
    cfg = RunConfig()
    paths = dict(doc.get("paths", {}))
    bad = set(paths) - {f.name for f in fields(Paths)}
    if bad:
        raise ConfigError(f"unknown key(s) in [paths]: {', '.join(sorted(bad))}")
    cfg.paths = Paths(**{k: base_dir / v for k, v in paths.items()})
    for section, (attr, cls) in _SECTIONS.items():
        if section in doc:
            setattr(cfg, attr, _build(cls, doc[section], section))
    if "seed" in doc:
        cfg.seed = int(doc["seed"])
    if "jobs" in doc:
        cfg.jobs = int(doc["jobs"])
    return cfg


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return from_dict(doc, path.parent)
