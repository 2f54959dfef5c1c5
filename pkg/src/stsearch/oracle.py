"""Simulated camera-record store.

A session wraps one hidden ground-truth trajectory and answers "was the
object at this location at this moment", charging one unit of cost per query
including repeats.  Strategies can only learn about the truth through
``search``; the counter and log make every episode auditable.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .grid import DiscreteTrajectory


class SearchSession:
    """Metered search access to one hidden object-day."""

    def __init__(self, truth: DiscreteTrajectory):
        if not truth.is_complete:
            raise ValueError("ground truth must be gap-free")
        self.__truth = truth.cells
        self.object_id = truth.object_id
        self.day_id = truth.day_id
        self.n_moments = len(truth.cells)
        self.log: list[tuple[int, int, int]] = []

    def search(self, location: int, moment: int) -> int:
        """One spatiotemporal search: 1 if the object was there, else 0.

        Every call is charged, repeated units included; a correct strategy
        never repeats a unit, so double charging surfaces bugs instead of
        hiding them.
        """
        if not 0 <= moment < self.n_moments:
            raise ValueError(f"moment {moment} outside the window")
        if location < 0:
            raise ValueError("location must be non-negative")
        outcome = 1 if self.__truth[moment] == location else 0
        self.log.append((location, moment, outcome))
        return outcome

    def cost(self) -> int:
        return len(self.log)


def dump_log(session: SearchSession, path: str | Path) -> None:
    """Audit-log dump: one row per executed search."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["step", "location", "moment", "outcome"])
        for step, (location, moment, outcome) in enumerate(session.log):
            writer.writerow([step, location, moment, outcome])
