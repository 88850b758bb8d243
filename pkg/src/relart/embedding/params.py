"""Training hyperparameters.

The six tuned parameters are dm, vector_size, sample, alpha, window and hs;
epochs, negative, min_count and seed are fixed training settings exposed as
configuration.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

__all__ = ["HyperParams"]

# Learning rate decays linearly from alpha to alpha * ALPHA_FLOOR_RATIO
# over the total number of trained tokens.
ALPHA_FLOOR_RATIO = 1e-4


@dataclass(frozen=True)
class HyperParams:
    dm: int = 0                # 1 = distributed memory, 0 = distributed bag of words
    vector_size: int = 128
    sample: float = 1e-4       # subsampling threshold; 0 disables
    alpha: float = 0.025       # initial learning rate
    window: int = 5
    hs: int = 1                # 1 = hierarchical softmax, 0 = negative sampling
    epochs: int = 10
    negative: int = 5          # noise words per example when hs = 0
    min_count: int = 5
    seed: int = 1

    def validate(self) -> "HyperParams":
        if self.dm not in (0, 1):
            raise ValueError(f"dm must be 0 or 1, got {self.dm}")
        if self.hs not in (0, 1):
            raise ValueError(f"hs must be 0 or 1, got {self.hs}")
        if self.vector_size < 1:
            raise ValueError(f"vector_size must be positive, got {self.vector_size}")
        if self.sample < 0:
            raise ValueError(f"sample must be non-negative, got {self.sample}")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.window < 1:
            raise ValueError(f"window must be positive, got {self.window}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be positive, got {self.epochs}")
        if self.hs == 0 and self.negative < 1:
            raise ValueError("negative sampling needs at least one noise word")
        if self.min_count < 1:
            raise ValueError(f"min_count must be positive, got {self.min_count}")
        return self

    @property
    def alpha_min(self) -> float:
        return self.alpha * ALPHA_FLOOR_RATIO

    @property
    def architecture(self) -> str:
        return "pv-dm" if self.dm == 1 else "pv-dbow"

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: dict) -> "HyperParams":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in payload.items() if k in known}).validate()

    def with_seed(self, seed: int) -> "HyperParams":
        return replace(self, seed=seed)
