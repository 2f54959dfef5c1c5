"""Indexed trajectory store.

Holds repaired trajectories of a shared window and answers the conjunctive
"how many trajectories pass through all of these (location, moment) units"
queries that drive mobility prediction.  Filtering out trajectories through a
unit produces a cheap immutable view sharing the index, because the
unit-by-unit strategy refilters after every failed search.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .grid import DiscreteTrajectory


@dataclass(frozen=True)
class UnitConstraint:
    """A (location id, moment id) query term."""

    location: int
    moment: int

    def __post_init__(self) -> None:
        if self.location < 0 or self.moment < 0:
            raise ValueError("location and moment must be non-negative")


_EMPTY: frozenset[int] = frozenset()


class Corpus:
    """Immutable collection of same-window trajectories with an inverted index.

    ``remove_through`` returns an overlay view that shares the trajectories
    and index and only carries a larger exclusion set; any number of readers
    may use a corpus or its views concurrently.
    """

    def __init__(
        self,
        trajectories: Sequence[DiscreteTrajectory],
        n_locations: int,
        n_moments: int,
        _index: Optional[dict[tuple[int, int], frozenset[int]]] = None,
        _cells: Optional[np.ndarray] = None,
        _excluded: frozenset[int] = _EMPTY,
    ):
        self._trajectories = list(trajectories)
        self.n_locations = n_locations
        self.n_moments = n_moments
        self._excluded = _excluded
        if _index is None:
            index: dict[tuple[int, int], set[int]] = {}
            for tid, t in enumerate(self._trajectories):
                for moment, cell in enumerate(t.cells):
                    index.setdefault((cell, moment), set()).add(tid)
            _index = {unit: frozenset(ids) for unit, ids in index.items()}
            _cells = np.array(
                [t.cells for t in self._trajectories], dtype=np.int32
            ).reshape(len(self._trajectories), n_moments)
        self._index = _index
        self._cells = _cells
        self._row_cache: dict = {}  # prediction rows, see predict module

    def __len__(self) -> int:
        return len(self._trajectories) - len(self._excluded)

    @property
    def trajectories(self) -> list[DiscreteTrajectory]:
        if not self._excluded:
            return list(self._trajectories)
        return [t for tid, t in enumerate(self._trajectories) if tid not in self._excluded]

    def trajectory(self, tid: int) -> DiscreteTrajectory:
        return self._trajectories[tid]

    def ids_matching(self, constraints: Sequence[UnitConstraint]) -> frozenset[int]:
        """Ids of trajectories satisfying every constraint."""
        if not constraints:
            raise ValueError("need at least one constraint")
        postings = []
        for c in constraints:
            self._check(c)
            postings.append(self._index.get((c.location, c.moment), _EMPTY))
        postings.sort(key=len)
        ids = postings[0]
        for p in postings[1:]:
            ids = ids & p
            if not ids:
                break
        return ids - self._excluded

    def count_matching(self, constraints: Sequence[UnitConstraint]) -> int:
        return len(self.ids_matching(constraints))

    def cells_at(self, moment: int, ids: Iterable[int]) -> np.ndarray:
        """Location ids of the given trajectories at one moment."""
        return self._cells[np.fromiter(ids, dtype=np.int64, count=-1), moment]

    def remove_through(self, u: UnitConstraint) -> "Corpus":
        """View of this corpus without the trajectories passing through ``u``."""
        self._check(u)
        hit = self._index.get((u.location, u.moment), _EMPTY)
        excluded = self._excluded | hit
        if excluded == self._excluded:
            return self
        return Corpus(
            self._trajectories,
            self.n_locations,
            self.n_moments,
            _index=self._index,
            _cells=self._cells,
            _excluded=excluded,
        )

    def split_by_day(self, train_days: set[str]) -> tuple["Corpus", "Corpus"]:
        """Partition into (train, test) by day id; every day id must exist."""
        present = {t.day_id for t in self.trajectories}
        unknown = set(train_days) - present
        if unknown:
            raise ValueError(f"unknown day ids: {sorted(unknown)}")
        train = [t for t in self.trajectories if t.day_id in train_days]
        test = [t for t in self.trajectories if t.day_id not in train_days]
        return (
            Corpus(train, self.n_locations, self.n_moments),
            Corpus(test, self.n_locations, self.n_moments),
        )

    def busyness(self) -> np.ndarray:
        """Distinct-trajectory count passing through each location."""
        counts = np.zeros(self.n_locations, dtype=np.int64)
        excluded = self._excluded
        for tid in range(len(self._trajectories)):
            if tid in excluded:
                continue
            counts[np.unique(self._cells[tid])] += 1
        return counts

    def busyness_groups(self, k: int = 4) -> dict[int, int]:
        """Split locations into ``k`` quantile groups of ascending busyness.

        Group 0 holds the least busy locations; busyness ties resolve by
        ascending location id.
        """
        if k < 1:
            raise ValueError("k must be at least 1")
        counts = self.busyness()
        order = sorted(range(self.n_locations), key=lambda l: (counts[l], l))
        n = self.n_locations
        return {loc: min(k - 1, rank * k // n) for rank, loc in enumerate(order)}

    def _check(self, c: UnitConstraint) -> None:
        if c.location >= self.n_locations:
            raise ValueError(f"location {c.location} out of range")
        if c.moment >= self.n_moments:
            raise ValueError(f"moment {c.moment} out of range")


def build_corpus(
    trajectories: Iterable[DiscreteTrajectory],
    n_locations: Optional[int] = None,
    n_moments: Optional[int] = None,
) -> Corpus:
    """Index a collection of repaired trajectories.

    ``n_locations``/``n_moments`` are inferred from the data when omitted;
    pass them explicitly for corpora that do not touch every location.
    """
    trajectories = list(trajectories)
    lengths = {len(t.cells) for t in trajectories}
    if len(lengths) > 1:
        raise ValueError(f"mixed window lengths: {sorted(lengths)}")
    for t in trajectories:
        if not t.is_complete:
            raise ValueError(f"trajectory {t.object_id}/{t.day_id} has gaps")
    if n_moments is None:
        n_moments = lengths.pop() if lengths else 0
    elif lengths and lengths.pop() != n_moments:
        raise ValueError("trajectories do not match n_moments")
    if n_locations is None:
        n_locations = 1 + max((max(t.cells) for t in trajectories), default=-1)
    for t in trajectories:
        if any(c >= n_locations for c in t.cells):
            raise ValueError("location id out of range")
    return Corpus(trajectories, n_locations, n_moments)
