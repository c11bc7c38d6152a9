from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields

SEED_ENV = "EDSPARSE_SEED"


def default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "1"))


@dataclass
class TrainConfig:
    seed: int = 1
    tagger_epochs: int = 30
    arc_epochs: int = 30
    batch_size: int = 32
    lr: float = 0.005
    clip: float = 5.0
    word_dim: int = 100
    char_dim: int = 32
    char_hidden: int = 32
    pos_dim: int = 16
    ctx_dim: int = 64
    ctx_layers: int = 3
    hidden: int = 100
    layers: int = 2
    concept_dim: int = 32
    mlp_hidden: int = 100
    label_hidden: int = 100
    threshold: int = 3
    min_tag_count: int = 1
    cost_fp: float = 0.4
    cost_fn: float = 0.6
    connected: bool = True
    restarts: int = 4
    activation: str = "relu"

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, bool) or f.name in ("activation", "seed"):
                continue
            if f.name in ("threshold", "cost_fp", "cost_fn"):
                if v < 0:
                    raise ValueError(f"{f.name} must be non-negative, got {v}")
            elif v <= 0:
                raise ValueError(f"{f.name} must be positive, got {v}")
        if self.activation not in ("relu", "tanh"):
            raise ValueError(f"unknown activation {self.activation!r}")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d) -> TrainConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**d)

    @classmethod
    def from_file(cls, path) -> TrainConfig:
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def replace(self, **overrides) -> TrainConfig:
        d = self.to_dict()
        d.update({k: v for k, v in overrides.items() if v is not None})
        return type(self).from_dict(d)
