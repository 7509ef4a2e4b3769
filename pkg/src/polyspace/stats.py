"""Exact pooling of Monte Carlo sums.

Per-sample values are integers (Betti numbers, indicators) or floats; both
are accumulated as exact rationals, so combining shards in any order or
grouping gives bit-identical means and variances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt

import numpy as np

_SAFE_INT = 1 << 20


@dataclass
class Tally:
    count: int = 0
    total: Fraction = Fraction(0)
    total_sq: Fraction = Fraction(0)
    rejected: int = 0

    def add(self, values) -> Tally:
        arr = np.asarray(values)
        if arr.size == 0:
            return self
        if arr.dtype.kind in "iub" and arr.size and int(np.abs(arr).max()) < _SAFE_INT:
            a = arr.astype(np.int64)
            s, sq = int(a.sum()), int((a * a).sum())
        elif arr.dtype.kind in "iubO":
            ints = [int(v) for v in arr.ravel()]
            s, sq = sum(ints), sum(v * v for v in ints)
        else:
            fr = [Fraction(float(v)) for v in arr.ravel()]
            s, sq = sum(fr, Fraction(0)), sum((v * v for v in fr), Fraction(0))
        self.count += arr.size
        self.total += s
        self.total_sq += sq
        return self

    def merge(self, other: Tally) -> Tally:
        return Tally(
            self.count + other.count,
            self.total + other.total,
            self.total_sq + other.total_sq,
            self.rejected + other.rejected,
        )

    @property
    def exact_mean(self) -> Fraction:
        return Fraction(self.total) / self.count

    @property
    def m2(self) -> Fraction:
        """Sum of squared deviations from the mean."""
        return Fraction(self.total_sq) - Fraction(self.total) ** 2 / self.count

    @property
    def exact_variance(self) -> Fraction:
        return self.m2 / (self.count - 1) if self.count > 1 else Fraction(0)


@dataclass
class Estimate:
    """Monte Carlo result; ``stderr = sqrt(variance / count)``."""

    mean: float
    variance: float
    stderr: float
    count: int
    rejected: int = 0
    theory: float | None = None
    config: dict = field(default_factory=dict)
    exact_mean: Fraction | None = None
    extras: dict = field(default_factory=dict)

    @classmethod
    def from_tally(cls, tally: Tally, theory=None, config=None, extras=None) -> Estimate:
        var = tally.exact_variance
        return cls(
            mean=float(tally.exact_mean),
            variance=float(var),
            stderr=sqrt(float(var / tally.count)),
            count=tally.count,
            rejected=tally.rejected,
            theory=None if theory is None else float(theory),
            config=dict(config or {}),
            exact_mean=tally.exact_mean,
            extras=dict(extras or {}),
        )

    @property
    def deviation(self) -> float | None:
        return None if self.theory is None else abs(self.mean - self.theory)

    @property
    def relative_stderr(self) -> float:
        return self.stderr / abs(self.mean) if self.mean else float("inf")

    def within(self, target: float, sigmas: float = 4.0, floor: float = 0.0) -> bool:
        return abs(self.mean - target) <= max(floor, sigmas * self.stderr)

    def to_dict(self) -> dict:
        out = {
            "mean": self.mean,
            "variance": self.variance,
            "stderr": self.stderr,
            "count": self.count,
            "rejected": self.rejected,
            "theory": self.theory,
        }
        if self.exact_mean is not None:
            out["mean_exact"] = str(self.exact_mean)
        if self.extras:
            out["extras"] = self.extras
        if self.config:
            out["config"] = self.config
        return out


def combined_stderr(*estimates: Estimate) -> float:
    return sqrt(sum(e.stderr**2 for e in estimates))
