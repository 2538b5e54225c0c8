"""Training/experiment configuration and flat key-value config files."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path


@dataclass
class TrainConfig:
    alpha: float = 100.0
    beta: float = 1.0
    gp_lambda: float = 10.0
    lr: float = 5e-4
    batch_size: int = 16
    critic_steps: int = 5
    epochs: int = 200
    seed: int = 0
    adam_betas: tuple[float, float] = (0.5, 0.9)
    checkpoint_every: int = 50

    def __post_init__(self):
        for name in ("alpha", "beta"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("gp_lambda", "lr", "batch_size", "critic_steps", "epochs"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class ExperimentConfig:
    sweep_axis: str = "combinations"  # combinations | sizes | poses
    sizes: tuple[int, ...] = (80, 90, 100)
    repetitions: int = 1

    def __post_init__(self):
        if self.sweep_axis not in ("combinations", "sizes", "poses"):
            raise ValueError(f"unknown sweep axis {self.sweep_axis!r}")
        if not self.sizes:
            raise ValueError("size grid must be nonempty")


def _coerce(text: str, kind: type):
    if kind is bool:
        return text.lower() in ("1", "true", "yes")
    if kind in (int, float, str):
        return kind(text)
    # tuples: comma-separated
    return tuple(float(x) if "." in x else int(x) for x in text.split(","))


def load_config_file(path: str | Path, base: TrainConfig | None = None) -> TrainConfig:
    """Read `key = value` lines; unknown keys are rejected."""
    cfg = base or TrainConfig()
    known = {f.name: f for f in fields(TrainConfig)}
    overrides = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        current = getattr(cfg, key)
        overrides[key] = _coerce(val, type(current)) if not isinstance(current, tuple) else _coerce(val, tuple)
    return replace(cfg, **overrides)


def dump_config(cfg: TrainConfig) -> str:
    lines = []
    for f in fields(TrainConfig):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            v = ",".join(str(x) for x in v)
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"
