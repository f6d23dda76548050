"""Incremental per-arm sample statistics.

One RunningStats value accumulates the pull count, running mean, and centered
second moment of everything an arm has returned.  The centered (Welford)
recursion is used instead of raw sum-of-squares accumulation so that variance
estimates stay accurate for sequences sitting on a large offset; both variance
estimators are then exact algebraic reads of the same state:

    unbiased = M2 / (count - 1)        biased = M2 / count

which keeps biased = ((count - 1) / count) * unbiased an exact identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass
class RunningStats:
    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def update(self, x: float) -> None:
        """Fold one sample into the running state."""
        self.count += 1
        d = x - self.mean
        self.mean += d / self.count
        self.m2 += d * (x - self.mean)

    def variance_biased(self) -> float:
        """Mean squared deviation with the 1/count normalization."""
        if self.count < 1:
            raise ValueError("biased variance undefined before the first sample")
        return _clamp(self.m2 / self.count)

    def variance_unbiased(self) -> float:
        """Sample variance with the 1/(count - 1) normalization."""
        if self.count < 2:
            raise ValueError("unbiased variance needs at least two samples")
        return _clamp(self.m2 / (self.count - 1))

    def sd_unbiased(self) -> float:
        return math.sqrt(self.variance_unbiased())


def _clamp(v: float) -> float:
    # Rounding can leave M2 a hair below zero; never let sqrt see it.
    return 0.0 if v < 0.0 else v
