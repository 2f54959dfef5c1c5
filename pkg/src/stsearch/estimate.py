"""Search-cost estimators and the heuristic indicators built on them.

Sweeping the locations of one moment in descending predicted probability
costs one search if the top location hits, two if the second does, and so on;
the expected cost of a sweep is therefore the rank-weighted sum of the sorted
probabilities.  The indicators divide an expected cost by the timespan it
buys, which is what lets the adaptive strategies decide when the next search
step should happen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, UnitConstraint
from .predict import Evidence, RankedPrediction, first_order, predict, rank


@dataclass(frozen=True)
class CostEstimate:
    """Expected number of searches; always within [1, number of locations]."""

    value: float

    def __float__(self) -> float:
        return self.value


def expected_searches(r: RankedPrediction) -> CostEstimate:
    """Rank-weighted expected sweep cost: sum over positions j of j * p[j]."""
    positions = np.arange(1, len(r.probs) + 1)
    return CostEstimate(float(positions @ r.probs))


def estimate_second_stage(
    train: Corpus,
    start: UnitConstraint,
    mid_moment: int,
    end_moment: int,
    variant: str = "second",
) -> CostEstimate:
    """Expected end-moment sweep cost after a hypothetical hit at ``mid_moment``.

    The hit location is unknown at estimation time, so the estimate weighs
    every possible mid location by its predicted probability and averages the
    expected sweep cost of the prediction conditioned on start unit plus that
    mid unit.  Zero-probability mid locations contribute nothing and are
    skipped.
    """
    if not start.moment < mid_moment < end_moment:
        raise ValueError("need start.moment < mid_moment < end_moment")
    mid_probs = first_order(train, start, mid_moment).probs
    total = 0.0
    for location in np.flatnonzero(mid_probs):
        ev = Evidence((start, UnitConstraint(int(location), mid_moment)))
        cost = expected_searches(rank(predict(train, ev, end_moment, variant)))
        total += float(mid_probs[location]) * cost.value
    return CostEstimate(total)


def moment_indicator(r: RankedPrediction, t_k: int, t_cur: int) -> float:
    """Expected sweep cost at ``t_k`` divided by the timespan from ``t_cur``."""
    if t_k <= t_cur:
        raise ValueError("candidate moment must lie after the current moment")
    return expected_searches(r).value / (t_k - t_cur)


def unit_indicator(p_j: float, t_k: int, t_cur: int) -> float:
    """Expected searches to find the object at one unit, per moment of timespan.

    A location with appearing probability p takes 1/p searches in expectation;
    p = 0 yields +inf so that impossible units are never selected.
    """
    if t_k <= t_cur:
        raise ValueError("candidate moment must lie after the current moment")
    if not 0.0 <= p_j <= 1.0:
        raise ValueError("probability out of [0, 1]")
    if p_j == 0.0:
        return math.inf
    return (1.0 / p_j) / (t_k - t_cur)
