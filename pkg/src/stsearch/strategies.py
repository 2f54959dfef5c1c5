"""The five searching strategies.

All strategies know the witnessed start unit, may search any moment up to the
end moment, and must pin down the object's location at the end moment with as
few metered searches as possible:

* ``alt``   searches only the end moment, locations in descending predicted
            probability.
* ``ipm``   sweeps one caller-chosen intermediate moment first, then the end
            moment with the extra evidence.
* ``iem``   like ``ipm`` but picks the intermediate moment by minimizing the
            estimated two-stage cost.
* ``ihms``  repeatedly sweeps the moment with the lowest expected-cost to
            timespan ratio until it reaches the end moment.
* ``ihus``  searches one (location, moment) unit at a time, always the unit
            with the lowest inverse-probability to timespan ratio, filtering
            the trajectories of missed units out of the training view.

Every runner is deterministic: ranking ties resolve by ascending location id
and indicator ties by the earliest moment.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .corpus import Corpus, UnitConstraint
from .estimate import estimate_second_stage, expected_searches
from .oracle import SearchSession
from .predict import Evidence, RankedPrediction, predict, rank

STRATEGY_NAMES = ("alt", "ipm", "iem", "ihms", "ihus")


@dataclass(frozen=True)
class Episode:
    """One tracking task: witnessed unit, deadline, training data, oracle."""

    start: UnitConstraint
    end_moment: int
    train: Corpus
    session: SearchSession

    def __post_init__(self) -> None:
        if not self.start.moment < self.end_moment <= self.train.n_moments - 1:
            raise ValueError("need start.moment < end_moment <= last moment")
        if self.session.n_moments != self.train.n_moments:
            raise ValueError("session window differs from training window")


@dataclass(frozen=True)
class TrackResult:
    """Outcome of one episode.

    ``steps`` lists (moment searched, searches spent there, hit location or
    None); the final step is always the hit at the end moment.
    """

    found_location: int
    total_searches: int
    steps: tuple[tuple[int, int, Optional[int]], ...]


def sweep_moment(
    session: SearchSession, order: np.ndarray, moment: int
) -> tuple[int, int]:
    """Search one moment's locations in the given order until the hit.

    Returns (hit location, searches spent).  Termination is guaranteed when
    ``order`` contains every location: the object is at exactly one of them.
    """
    for position, location in enumerate(order, start=1):
        if session.search(int(location), moment):
            return int(location), position
    raise RuntimeError("sweep exhausted the ranking without a hit")


def run_alt(e: Episode, variant: str = "first") -> TrackResult:
    """All searching at the last time."""
    ranking = rank(predict(e.train, Evidence((e.start,)), e.end_moment, variant))
    location, spent = sweep_moment(e.session, ranking.order, e.end_moment)
    return TrackResult(location, spent, ((e.end_moment, spent, location),))


def run_ipm(e: Episode, t_mid: int, variant: str = "first") -> TrackResult:
    """Intermediate searching at a parametric moment.

    ``t_mid == end_moment`` collapses to a single end-moment sweep; sweeping
    the same moment twice would only recount the same locations.
    """
    if not e.start.moment < t_mid <= e.end_moment:
        raise ValueError("t_mid must lie in (start.moment, end_moment]")
    if t_mid == e.end_moment:
        return run_alt(e, variant)
    first_ranking = rank(predict(e.train, Evidence((e.start,)), t_mid, variant))
    mid_location, m = sweep_moment(e.session, first_ranking.order, t_mid)
    evidence = Evidence((e.start, UnitConstraint(mid_location, t_mid)))
    second_ranking = rank(predict(e.train, evidence, e.end_moment, variant))
    location, n = sweep_moment(e.session, second_ranking.order, e.end_moment)
    return TrackResult(
        location, m + n, ((t_mid, m, mid_location), (e.end_moment, n, location))
    )


def run_iem(e: Episode, variant: str = "first") -> TrackResult:
    """Intermediate searching at an estimated moment.

    Scores every candidate moment with the estimated first-stage sweep cost
    plus, for interior candidates, the estimated second-stage cost, then runs
    the parametric strategy at the argmin (ties take the earliest moment).
    The estimates always condition the second stage on both known units,
    whatever prediction variant the sweeps themselves use.
    """
    start_evidence = Evidence((e.start,))
    best_moment, best_score = e.end_moment, None
    for t_k in range(e.start.moment + 1, e.end_moment + 1):
        score = expected_searches(rank(predict(e.train, start_evidence, t_k))).value
        if t_k < e.end_moment:
            score += estimate_second_stage(e.train, e.start, t_k, e.end_moment).value
        if best_score is None or score < best_score:
            best_moment, best_score = t_k, score
    return run_ipm(e, best_moment, variant)


def run_ihms(e: Episode, variant: str = "first") -> TrackResult:
    """Intermediate searching at heuristic moments.

    Each step sweeps the remaining moment whose expected sweep cost per moment
    of timespan is smallest, then re-predicts from the newly-won location.
    Every step advances strictly, so at most ``end - start`` sweeps happen.
    """
    units = [e.start]
    t_cur = e.start.moment
    total = 0
    steps: list[tuple[int, int, Optional[int]]] = []
    location = e.start.location
    while t_cur < e.end_moment:
        evidence = Evidence(tuple(units))
        best: tuple[float, int, RankedPrediction] | None = None
        for t_k in range(t_cur + 1, e.end_moment + 1):
            ranking = rank(predict(e.train, evidence, t_k, variant))
            indicator = expected_searches(ranking).value / (t_k - t_cur)
            if best is None or indicator < best[0]:
                best = (indicator, t_k, ranking)
        _, t_opt, ranking = best
        location, spent = sweep_moment(e.session, ranking.order, t_opt)
        steps.append((t_opt, spent, location))
        total += spent
        units.append(UnitConstraint(location, t_opt))
        t_cur = t_opt
    return TrackResult(location, total, tuple(steps))


def run_ihus(e: Episode, variant: str = "first") -> TrackResult:
    """Intermediate searching at heuristic spatiotemporal units.

    Each step searches the single unit minimizing (1/probability)/timespan,
    ties by earlier moment then lower location id.  A miss removes every
    training trajectory through that unit from the working view and excludes
    the unit itself from future candidates, so uniform fallback rows cannot
    resurrect it; a hit advances the evidence.  The while loop is bounded by
    one hit or miss per unit of the remaining window.
    """
    units = [e.start]
    t_cur = e.start.moment
    location = e.start.location
    view = e.train
    searched: dict[int, list[int]] = {}  # moment -> searched locations
    total = 0
    steps: list[tuple[int, int, Optional[int]]] = []
    budget = e.train.n_locations * (e.end_moment - e.start.moment)
    while t_cur < e.end_moment:
        if total >= budget:
            raise RuntimeError("unit search exceeded its termination bound")
        evidence = Evidence(tuple(units))
        best: tuple[float, int, int] | None = None  # (indicator, moment, location)
        for t_k in range(t_cur + 1, e.end_moment + 1):
            probs = predict(view, evidence, t_k, variant).probs
            blocked = searched.get(t_k)
            if blocked is not None:
                probs = probs.copy()
                probs[blocked] = 0.0
            candidate = int(np.argmax(probs))
            p = float(probs[candidate])
            if p <= 0.0:
                continue
            indicator = 1.0 / (p * (t_k - t_cur))
            if best is None or indicator < best[0]:
                best = (indicator, t_k, candidate)
        if best is None:
            raise RuntimeError("no searchable unit left before the end moment")
        _, t_opt, l_opt = best
        hit = e.session.search(l_opt, t_opt)
        total += 1
        if hit:
            steps.append((t_opt, 1, l_opt))
            units.append(UnitConstraint(l_opt, t_opt))
            location, t_cur = l_opt, t_opt
        else:
            steps.append((t_opt, 1, None))
            view = view.remove_through(UnitConstraint(l_opt, t_opt))
            searched.setdefault(t_opt, []).append(l_opt)
    return TrackResult(location, total, tuple(steps))


def run_strategy(
    name: str,
    e: Episode,
    variant: str = "first",
    ipm_mid: Optional[int] = None,
) -> TrackResult:
    """Dispatch one episode to a strategy by name."""
    if name == "alt":
        return run_alt(e, variant)
    if name == "ipm":
        if ipm_mid is None:
            # midpoint default, clamped into the valid (start, end] range
            ipm_mid = max(e.start.moment + 1, e.start.moment + (e.end_moment - e.start.moment) // 2)
        return run_ipm(e, ipm_mid, variant)
    if name == "iem":
        return run_iem(e, variant)
    if name == "ihms":
        return run_ihms(e, variant)
    if name == "ihus":
        return run_ihus(e, variant)
    raise ValueError(f"unknown strategy: {name!r}")


def format_steps(steps: Iterable[tuple[int, int, Optional[int]]]) -> str:
    """Compact ``moment:spent:hit`` encoding, misses with an empty hit field."""
    return ";".join(
        f"{moment}:{spent}:{'' if hit is None else hit}" for moment, spent, hit in steps
    )


def write_episode_csv(rows: Iterable[dict], path: str | Path) -> None:
    """Episode result dump shared by the CLI and the benchmark driver."""
    fields = [
        "strategy",
        "object_id",
        "day_id",
        "t_p",
        "t_x",
        "start_loc",
        "found_loc",
        "total_searches",
        "steps",
    ]
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in fields})
