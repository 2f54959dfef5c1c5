from __future__ import annotations

import pytest

from stsearch.corpus import Corpus, build_corpus
from stsearch.grid import DiscreteTrajectory, GridConfig

# Five-trajectory toy corpus over four locations and three moments; the
# worked examples across the test suite are hand-checked against it.
# Location ids: l1..l4 -> 0..3, moments t1..t3 -> 0..2.
TOY_ROWS = [
    ("c1", "d1", (0, 1, 2)),
    ("c1", "d2", (1, 1, 2)),
    ("c1", "d3", (1, 0, 0)),
    ("c2", "d1", (2, 3, 3)),
    ("c2", "d2", (1, 3, 2)),
]


def toy_trajectories() -> list[DiscreteTrajectory]:
    return [DiscreteTrajectory(obj, day, cells) for obj, day, cells in TOY_ROWS]


@pytest.fixture
def toy_corpus() -> Corpus:
    return build_corpus(toy_trajectories(), n_locations=4)


@pytest.fixture
def small_grid() -> GridConfig:
    # 30 x 30 km around a flat-ish reference point, 1-minute moments,
    # 900-moment window (07:00 through 21:59)
    return GridConfig(
        origin_lat=30.0,
        origin_lon=104.0,
        cell_size_km=1.0,
        n_rows=30,
        n_cols=30,
        moment_seconds=60,
        day_start=7 * 3600,
        day_end=22 * 3600,
    )
