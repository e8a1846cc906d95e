"""
Aggregation of trial outcomes into summary statistics.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..engine.results import TrialResult


@dataclass
class TrialStats:
    """Summary of the step counts of a set of trials."""
    count: int
    mean: float
    min: int
    max: int
    bin_width: int
    histogram: List[Tuple[int, int, int]] = field(default_factory=list)  # (lo, hi, count), hi exclusive
    multi_leader_count: int = 0
    incorrect_count: int = 0
    excluded: int = 0  # trials without a step count (did not halt or converge)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "count": self.count,
            "mean": self.mean,
            "min": self.min,
            "max": self.max,
            "bin_width": self.bin_width,
            "histogram": [{"lo": lo, "hi": hi, "count": c} for lo, hi, c in self.histogram],
            "multi_leader_count": self.multi_leader_count,
            "incorrect_count": self.incorrect_count,
            "excluded": self.excluded,
        }


def _histogram(steps: np.ndarray, bin_width: int) -> List[Tuple[int, int, int]]:
    lo = int(steps.min()) // bin_width * bin_width
    hi = (int(steps.max()) // bin_width + 1) * bin_width
    counts, edges = np.histogram(steps, bins=np.arange(lo, hi + 1, bin_width))
    return [(int(edges[i]), int(edges[i + 1]), int(c)) for i, c in enumerate(counts)]


def aggregate_trials(
    results: Sequence[Union[TrialResult, int]],
    bin_width: int = 10,
    multi_leader_count: Optional[int] = None,
) -> TrialStats:
    """
    Mean, extremes and a fixed-width histogram of the step counts.

    Args:
        results: Trial results (their ``steps``) or plain step counts
        bin_width: Histogram bin width in rounds
        multi_leader_count: Override for the number of multi-leader trials

    Returns:
        TrialStats whose histogram counts sum to ``count``

    Raises:
        ValueError: If no result carries a step count
    """
    if bin_width < 1:
        raise ValueError(f"bin_width must be >= 1, got {bin_width}")

    steps, excluded, multi, incorrect = [], 0, 0, 0
    for item in results:
        if isinstance(item, TrialResult):
            multi += item.leader_count > 1
            incorrect += not item.correct
            value = item.steps
        else:
            value = item
        if value is None:
            excluded += 1
        else:
            steps.append(int(value))

    if not steps:
        raise ValueError("Cannot aggregate an empty set of trials")

    arr = np.asarray(steps, dtype=np.int64)
    return TrialStats(
        count=len(steps),
        mean=float(arr.mean()),
        min=int(arr.min()),
        max=int(arr.max()),
        bin_width=bin_width,
        histogram=_histogram(arr, bin_width),
        multi_leader_count=multi if multi_leader_count is None else multi_leader_count,
        incorrect_count=incorrect,
        excluded=excluded,
    )


def empirical_quantile(values: Sequence[int], q: float) -> int:
    """Smallest observed value with at least a fraction ``q`` of the samples at or below it."""
    if not values:
        raise ValueError("Cannot take a quantile of no values")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    return int(np.quantile(np.asarray(values), q, method="inverted_cdf"))


def multi_leader_curve(results: Sequence[TrialResult]) -> List[int]:
    """Number of trials with more than one flagged node after each election round."""
    rounds = max((len(r.leaders_by_round) for r in results), default=0)
    curve = [0] * rounds
    for result in results:
        for index, count in enumerate(result.leaders_by_round):
            if count > 1:
                curve[index] += 1
    return curve
