"""Synthetic mobility data.

The generator produces one gap-free object-day per (object, day) pair with a
momentum random walk: each step keeps the previous move vector with
probability ``persistence`` and otherwise redraws it uniformly from the four
grid neighbors plus staying put.  Positions are clipped at the grid border
while the intended move vector persists, so a fully persistent walker runs in
a straight line and then sits at the wall.  Everything is deterministic given
the seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import DiscreteTrajectory, GridConfig

# move vectors: stay, north, south, east, west (rows grow northward)
MOVE_DR = np.array([0, 1, -1, 0, 0], dtype=np.int64)
MOVE_DC = np.array([0, 0, 0, 1, -1], dtype=np.int64)


@dataclass(frozen=True)
class SynthParams:
    grid: GridConfig
    n_objects: int
    n_days: int
    persistence: float
    seed: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.persistence <= 1.0:
            raise ValueError("persistence must be within [0, 1]")
        if self.n_objects < 1 or self.n_days < 1:
            raise ValueError("need at least one object and one day")


def synth(p: SynthParams) -> list[DiscreteTrajectory]:
    """Generate ``n_objects * n_days`` momentum-walk trajectories."""
    g = p.grid
    n_walks = p.n_objects * p.n_days
    n_moments = g.n_moments
    rng = np.random.default_rng(p.seed)

    rows = rng.integers(0, g.n_rows, size=n_walks)
    cols = rng.integers(0, g.n_cols, size=n_walks)
    move = rng.integers(0, 5, size=n_walks)

    cells = np.empty((n_walks, n_moments), dtype=np.int64)
    cells[:, 0] = rows * g.n_cols + cols
    for t in range(1, n_moments):
        fresh = rng.integers(0, 5, size=n_walks)
        redraw = rng.random(n_walks) >= p.persistence
        move = np.where(redraw, fresh, move)
        rows = np.clip(rows + MOVE_DR[move], 0, g.n_rows - 1)
        cols = np.clip(cols + MOVE_DC[move], 0, g.n_cols - 1)
        cells[:, t] = rows * g.n_cols + cols

    trajectories = []
    for obj in range(p.n_objects):
        for day in range(p.n_days):
            walk = obj * p.n_days + day
            trajectories.append(
                DiscreteTrajectory(
                    object_id=f"obj{obj}",
                    day_id=f"d{day}",
                    cells=tuple(int(c) for c in cells[walk]),
                )
            )
    return trajectories
