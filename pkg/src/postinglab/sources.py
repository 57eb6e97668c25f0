"""Reproducible Bernoulli bit sources."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bits import array_to_bits

__all__ = ["SourceSpec", "SourceSequence", "sample_source"]


@dataclass(frozen=True)
class SourceSpec:
    """Parameters of an i.i.d. Bernoulli source: P(symbol = '1') = p."""

    p: float
    n: int
    seed: int

    def __post_init__(self) -> None:
        # p in {0, 1} is rejected: downstream frequency formulas divide by
        # both p and 1-p, and a constant source has no usable statistics.
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie strictly between 0 and 1, got {self.p}")
        if self.n < 1:
            raise ValueError(f"source length must be >= 1, got {self.n}")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")


@dataclass(frozen=True)
class SourceSequence:
    bits: str
    spec: SourceSpec

    def __len__(self) -> int:
        return len(self.bits)


def sample_source(spec: SourceSpec) -> SourceSequence:
    """Draw the source sequence for *spec*; deterministic per seed."""
    rng = np.random.default_rng(spec.seed)
    draw = rng.random(spec.n) < spec.p
    return SourceSequence(array_to_bits(draw.astype(np.uint8)), spec)
