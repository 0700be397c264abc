"""Sample statistics with a normal-approximation 99% confidence interval."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

Z99 = 2.5758


@dataclass(frozen=True)
class StatsSummary:
    count: int
    mean: float
    sample_std: float
    ci99_low: float
    ci99_high: float
    expected: float | None
    rel_err_pct: float | None
    within_ci: bool | None


def summarize(samples: Sequence[float], expected: float | None, z: float = Z99) -> StatsSummary:
    """Mean, sample std (n - 1 denominator) and mean +/- z * std / sqrt(count).

    ``rel_err_pct`` is None when there is no prediction or it is not positive;
    ``within_ci`` is None only when there is no prediction.
    """
    count = len(samples)
    if count < 2:
        raise ValueError(f"need at least 2 samples for a confidence interval, got {count}")
    mean = math.fsum(samples) / count
    var = math.fsum((x - mean) ** 2 for x in samples) / (count - 1)
    std = math.sqrt(var)
    half = z * std / math.sqrt(count)
    low, high = mean - half, mean + half
    if expected is None:
        return StatsSummary(count, mean, std, low, high, None, None, None)
    rel = 100.0 * abs(mean - expected) / expected if expected > 0 else None
    return StatsSummary(count, mean, std, low, high, expected, rel, low <= expected <= high)
