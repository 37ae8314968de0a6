"""Metric summaries."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MetricSummary:
    name: str
    value: float
    count: int = 1


def mean_summary(name: str, values: Sequence[float]) -> MetricSummary:
    """Mean over the finite entries; NaN when there are none."""
    arr = np.asarray(values, dtype=np.float64)
    finite = arr[np.isfinite(arr)]
    if finite.size == 0:
        return MetricSummary(name, float("nan"), 0)
    return MetricSummary(name, float(finite.mean()), int(finite.size))
