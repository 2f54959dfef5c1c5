"""Markov mobility prediction over the trajectory corpus.

Every predictor returns the appearing probability of each location at a target
moment, computed as raw frequency ratios over the matching training
trajectories.  Zero-support conditioning falls back to the uniform
distribution instead of smoothing: add-one smoothing would distort the sparse
rows far more than it helps.

Rows are memoized on the corpus (or corpus view) they were computed from, so
repeated queries during an episode and across episodes are cheap.  The cache
only ever stores values that a cold call would also produce, so concurrent
readers see the same results as sequential ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, UnitConstraint

SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class PredictionVector:
    """Probabilities over all locations for one moment."""

    target_moment: int
    probs: np.ndarray

    def __post_init__(self) -> None:
        p = self.probs
        if p.ndim != 1 or len(p) == 0:
            raise ValueError("probs must be a non-empty vector")
        if float(p.min()) < 0.0 or float(p.max()) > 1.0 + SUM_TOLERANCE:
            raise ValueError("probabilities out of [0, 1]")
        if abs(float(p.sum()) - 1.0) > SUM_TOLERANCE:
            raise ValueError(f"probabilities sum to {float(p.sum())}, not 1")
        p.flags.writeable = False


@dataclass(frozen=True)
class RankedPrediction:
    """A prediction vector sorted by descending probability.

    ``order`` is the permutation of location ids; equal probabilities keep
    ascending location id so that every ranking is deterministic.
    """

    target_moment: int
    order: np.ndarray
    probs: np.ndarray


@dataclass(frozen=True)
class Evidence:
    """The partially known trajectory of the target, ordered by moment."""

    known_units: tuple[UnitConstraint, ...]

    def __post_init__(self) -> None:
        moments = [u.moment for u in self.known_units]
        if any(b <= a for a, b in zip(moments, moments[1:])):
            raise ValueError("evidence moments must be strictly increasing")

    @property
    def latest(self) -> UnitConstraint:
        return self.known_units[-1]


def _uniform(train: Corpus, target: int) -> np.ndarray:
    if train.n_locations < 1:
        raise ValueError("corpus has no locations")
    return np.full(train.n_locations, 1.0 / train.n_locations)


def _distribution(train: Corpus, ids: frozenset[int], target: int) -> np.ndarray:
    """Empirical distribution of the conditioning set's locations at ``target``."""
    if not ids:
        return _uniform(train, target)
    counts = np.bincount(train.cells_at(target, ids), minlength=train.n_locations)
    return counts / len(ids)


def first_order(train: Corpus, from_unit: UnitConstraint, target: int) -> PredictionVector:
    """Appearing probabilities at ``target`` given one known unit.

    probs[j] = (# trajectories through the known unit and location j at the
    target) / (# trajectories through the known unit); uniform when the known
    unit has no training support.
    """
    if target <= from_unit.moment:
        raise ValueError("target moment must lie after the conditioning unit")
    key = ("1", from_unit, target)
    probs = train._row_cache.get(key)
    if probs is None:
        probs = _distribution(train, train.ids_matching([from_unit]), target)
        train._row_cache[key] = probs
    return PredictionVector(target, probs)


def second_order(
    train: Corpus,
    first: UnitConstraint,
    second: UnitConstraint,
    target: int,
) -> PredictionVector:
    """Appearing probabilities given two known units.

    When no trajectory passes through both units the chain degrades to the
    first-order row of the later unit, and from there to uniform; the later
    unit is the most specific evidence still worth keeping.
    """
    if not first.moment <= second.moment < target:
        raise ValueError("need first.moment <= second.moment < target")
    key = ("2", first, second, target)
    probs = train._row_cache.get(key)
    if probs is None:
        ids = train.ids_matching([first, second])
        if ids:
            probs = _distribution(train, ids, target)
        else:
            probs = first_order(train, second, target).probs
        train._row_cache[key] = probs
    return PredictionVector(target, probs)


def time_specific_first_order(
    train: Corpus,
    from_unit: UnitConstraint,
    target: int,
    pooled: bool = False,
) -> PredictionVector:
    """First-order prediction, optionally pooling counts across start moments.

    With ``pooled=False`` this is exactly :func:`first_order`: conditioning on
    a (location, moment) unit is already moment-specific.  With
    ``pooled=True`` the transition counts are gathered at a fixed lag
    ``target - from_unit.moment`` from every start moment that keeps the lag
    inside the window, which trades moment specificity for denser rows.
    """
    if not pooled:
        return first_order(train, from_unit, target)
    if target <= from_unit.moment:
        raise ValueError("target moment must lie after the conditioning unit")
    lag = target - from_unit.moment
    key = ("pooled", from_unit.location, lag)
    probs = train._row_cache.get(key)
    if probs is None:
        counts = np.zeros(train.n_locations, dtype=np.int64)
        denominator = 0
        for start in range(train.n_moments - lag):
            ids = train.ids_matching([UnitConstraint(from_unit.location, start)])
            if not ids:
                continue
            counts += np.bincount(
                train.cells_at(start + lag, ids), minlength=train.n_locations
            )
            denominator += len(ids)
        probs = counts / denominator if denominator else _uniform(train, target)
        train._row_cache[key] = probs
    return PredictionVector(target, probs)


def predict(
    train: Corpus,
    evidence: Evidence,
    target: int,
    variant: str = "first",
) -> PredictionVector:
    """Predict from accumulated evidence.

    ``variant="first"`` conditions on the latest known unit only; it is the
    default because the sparse higher-order rows rank worse in practice.
    ``variant="second"`` conditions on the latest two units and falls back to
    first-order when only one is known.
    """
    if not evidence.known_units:
        raise ValueError("evidence is empty")
    if target <= evidence.latest.moment:
        raise ValueError("target moment must lie after the latest evidence")
    if variant == "first" or len(evidence.known_units) == 1:
        return first_order(train, evidence.latest, target)
    if variant == "second":
        prev, last = evidence.known_units[-2], evidence.known_units[-1]
        return second_order(train, prev, last, target)
    raise ValueError(f"unknown predictor variant: {variant!r}")


def rank(v: PredictionVector) -> RankedPrediction:
    """Sort locations by descending probability, ties by ascending id."""
    n = len(v.probs)
    order = np.lexsort((np.arange(n), -v.probs))
    probs = v.probs[order]
    order.flags.writeable = False
    probs.flags.writeable = False
    return RankedPrediction(v.target_moment, order, probs)
