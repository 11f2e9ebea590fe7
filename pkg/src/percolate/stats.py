"""Estimator records shared by the arm and harness studies."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np


@dataclass(frozen=True)
class EstimatorResult:
    """``value`` is a proportion or a conditional mean over ``accepted`` trials."""

    trials: int
    accepted: int
    total: float
    value: float
    stderr: float
    seed: int

    @property
    def phat(self) -> float:
        return self.value

    @property
    def hits(self) -> int:
        return int(self.total)

    def to_dict(self) -> dict:
        return asdict(self)


def proportion(trials: int, hits: int, seed: int) -> EstimatorResult:
    """Binomial estimate: stderr = sqrt(p(1-p)/trials)."""
    ph = hits / trials
    return EstimatorResult(trials, trials, float(hits), ph, math.sqrt(ph * (1 - ph) / trials), seed)


def mean_of(trials: int, values: np.ndarray, seed: int) -> EstimatorResult:
    """Sample mean of accepted values; stderr = sample sd / sqrt(accepted)."""
    k = int(values.size)
    if k == 0:
        raise ValueError("no accepted trials")
    v = values.astype(np.float64)
    mu = float(v.sum() / k)
    sd = float(np.sqrt(((v - mu) ** 2).sum() / (k - 1))) if k > 1 else 0.0
    return EstimatorResult(trials, k, float(v.sum()), mu, sd / math.sqrt(k), seed)


def ratio(a: float, sa: float, b: float, sb: float) -> tuple[float, float]:
    """a / b with delta-method stderr for independent a and b."""
    if b == 0:
        return math.nan, math.nan
    return a / b, math.sqrt((sa / b) ** 2 + (a * sb / b**2) ** 2)
