"""Pipeline configuration with flags > config file > defaults precedence."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .basedensity import BaseDensity, make_base

__all__ = ["PipelineConfig", "load_config", "ENV_VAR"]

ENV_VAR = "QCHAR_CONFIG"

# config-file spellings that differ from attribute names
_ALIASES = {"M_max": "m_max", "grid-span": "grid_span", "grid-count": "grid_count"}


@dataclass(frozen=True)
class PipelineConfig:
    power: int = 8
    shift: float = 1.0
    m_max: int = 64
    quadrature_order: int = 256
    epsilon: float | None = None
    epsilon_fraction: float = 0.5
    grid_count: int | None = None
    grid_span: float | None = None
    grid_tail: float = 1e-7
    truncation: int = 12
    tol: float = 1e-12
    seed: int = 0
    c3_grid_count: int = 4097
    falsify_epsilon: float = 0.5
    falsify_ladder: tuple = (0.75, 0.95)
    forward_samples: int = 50
    gram_size: int = 32
    corpus_grid_count: int = 128

    def base(self) -> BaseDensity:
        return make_base(self.power, self.shift, self.m_max, self.quadrature_order)

    def updated(self, **overrides) -> PipelineConfig:
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self) -> dict:
        return asdict(self)


def _normalise(raw: dict) -> dict:
    known = {f.name for f in fields(PipelineConfig)}
    out = {}
    for key, value in raw.items():
        key = _ALIASES.get(key, key)
        if key not in known:
            raise ValueError(f"unknown configuration key {key!r}")
        out[key] = value
    return out


def load_config(path: str | os.PathLike | None = None, **flags) -> PipelineConfig:
    """Defaults, then the JSON file (``path`` or ``$QCHAR_CONFIG``), then flags.

    Flags whose value is ``None`` are treated as not given.
    """
    cfg = PipelineConfig()
    path = path or os.environ.get(ENV_VAR)
    if path:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        cfg = replace(cfg, **_normalise(raw))
    return cfg.updated(**flags)
