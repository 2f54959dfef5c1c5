"""Spatiotemporal discretization of a city area.

A rectangular area is cut into square cells (locations, row-major ids) and a
daily time window into fixed-length moments.  Raw GPS traces are reduced to
one location per moment, and short runs of missing moments are filled in so
that downstream consumers always see gap-free trajectories.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional, Sequence

KM_PER_DEG_LAT = 110.574
KM_PER_DEG_LON_EQUATOR = 111.320

SECONDS_PER_DAY = 86400


@dataclass(frozen=True)
class GridConfig:
    """Grid geometry plus the daily observation window."""

    origin_lat: float
    origin_lon: float
    cell_size_km: float
    n_rows: int
    n_cols: int
    moment_seconds: int
    day_start: int
    day_end: int

    def __post_init__(self) -> None:
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError("grid needs at least one row and one column")
        if self.cell_size_km <= 0:
            raise ValueError("cell_size_km must be positive")
        if self.moment_seconds <= 0:
            raise ValueError("moment_seconds must be positive")
        if not 0 <= self.day_start < self.day_end <= SECONDS_PER_DAY:
            raise ValueError("day window must satisfy 0 <= day_start < day_end <= 86400")
        if self.n_moments < 1:
            raise ValueError("day window shorter than one moment")

    @property
    def n_locations(self) -> int:
        return self.n_rows * self.n_cols

    @property
    def n_moments(self) -> int:
        return (self.day_end - self.day_start) // self.moment_seconds

    @property
    def km_per_deg_lon(self) -> float:
        return KM_PER_DEG_LON_EQUATOR * math.cos(math.radians(self.origin_lat))

    def cell_center_km(self, location: int) -> tuple[float, float]:
        """(north_km, east_km) of a cell center relative to the origin."""
        row, col = divmod(location, self.n_cols)
        return (row + 0.5) * self.cell_size_km, (col + 0.5) * self.cell_size_km


@dataclass(frozen=True)
class RawPoint:
    """One GPS waypoint of one object."""

    object_id: str
    lat: float
    lon: float
    timestamp: float

    def __post_init__(self) -> None:
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude out of range: {self.lat}")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude out of range: {self.lon}")


@dataclass(frozen=True)
class DiscreteTrajectory:
    """One object-day: a location id (or None before repair) per moment."""

    object_id: str
    day_id: str
    cells: tuple[Optional[int], ...]

    @property
    def is_complete(self) -> bool:
        return all(c is not None for c in self.cells)


def _cell_from_km(north_km: float, east_km: float, g: GridConfig) -> Optional[int]:
    # Floor semantics: a point exactly on an edge belongs to the lower cell,
    # the far edge of the grid is already outside.
    if north_km < 0 or east_km < 0:
        return None
    row = int(north_km // g.cell_size_km)
    col = int(east_km // g.cell_size_km)
    if row >= g.n_rows or col >= g.n_cols:
        return None
    return row * g.n_cols + col


def assign_cell(p: RawPoint, g: GridConfig) -> Optional[int]:
    """Row-major cell id of a point, or None when it lies outside the grid.

    Uses an equirectangular projection anchored at the grid origin; fine for
    city-scale extents where curvature error is negligible.
    """
    north_km = (p.lat - g.origin_lat) * KM_PER_DEG_LAT
    east_km = (p.lon - g.origin_lon) * g.km_per_deg_lon
    return _cell_from_km(north_km, east_km, g)


def moment_of_timestamp(timestamp: float, g: GridConfig) -> Optional[int]:
    """Moment id of an epoch timestamp, or None outside the daily window."""
    second_of_day = timestamp % SECONDS_PER_DAY
    if not g.day_start <= second_of_day < g.day_end:
        return None
    moment = int((second_of_day - g.day_start) // g.moment_seconds)
    return moment if moment < g.n_moments else None


def _utc_day_id(timestamp: float) -> str:
    return datetime.fromtimestamp(timestamp, tz=timezone.utc).date().isoformat()


def discretize(points: Sequence[RawPoint], g: GridConfig) -> DiscreteTrajectory:
    """Reduce one object-day of GPS points to one location per moment.

    When several points fall into the same moment, the earliest one that lies
    inside the grid wins; points outside the grid carry no location.  Moments
    without any in-grid point stay None.
    """
    if not points:
        raise ValueError("no points given")
    object_id = points[0].object_id
    day_id = _utc_day_id(points[0].timestamp)
    cells: list[Optional[int]] = [None] * g.n_moments
    prev_ts = None
    for p in points:
        if prev_ts is not None and p.timestamp < prev_ts:
            raise ValueError("points must be sorted by timestamp")
        prev_ts = p.timestamp
        if p.object_id != object_id:
            raise ValueError("points mix object ids")
        if _utc_day_id(p.timestamp) != day_id:
            raise ValueError("points span more than one day")
        moment = moment_of_timestamp(p.timestamp, g)
        if moment is None or cells[moment] is not None:
            continue
        cell = assign_cell(p, g)
        if cell is not None:
            cells[moment] = cell
    return DiscreteTrajectory(object_id, day_id, tuple(cells))


def repair(
    t: DiscreteTrajectory,
    g: GridConfig,
    max_edge_gap: int = 5,
    max_interior_gap: int = 10,
    max_interior_km: float = 15.0,
) -> Optional[DiscreteTrajectory]:
    """Fill the gaps of a discretized trajectory, or return None to discard it.

    Leading/trailing runs of at most ``max_edge_gap`` unknown moments take the
    nearest known location.  Interior runs of at most ``max_interior_gap``
    moments whose flanking cell centers are at most ``max_interior_km`` apart
    are filled by straight-line interpolation of the centers, re-assigned to
    cells.  Anything longer or farther discards the whole trajectory, as does
    a day with fewer than two known moments.
    """
    cells = list(t.cells)
    known = [i for i, c in enumerate(cells) if c is not None]
    if len(known) < 2:
        return None
    first, last = known[0], known[-1]
    if first > max_edge_gap or (len(cells) - 1 - last) > max_edge_gap:
        return None
    for i in range(first):
        cells[i] = cells[first]
    for i in range(last + 1, len(cells)):
        cells[i] = cells[last]
    for a, b in zip(known, known[1:]):
        gap = b - a - 1
        if gap == 0:
            continue
        if gap > max_interior_gap:
            return None
        start_n, start_e = g.cell_center_km(cells[a])
        end_n, end_e = g.cell_center_km(cells[b])
        if math.hypot(end_n - start_n, end_e - start_e) > max_interior_km:
            return None
        for i in range(1, gap + 1):
            frac = i / (gap + 1)
            cell = _cell_from_km(
                start_n + frac * (end_n - start_n),
                start_e + frac * (end_e - start_e),
                g,
            )
            if cell is None:
                return None
            cells[a + i] = cell
    return DiscreteTrajectory(t.object_id, t.day_id, tuple(cells))


# ---------------------------------------------------------------------------
# File formats


def read_grid_config(path: str | Path) -> GridConfig:
    """Parse a flat key-value config file (``key = value``, ``#`` comments)."""
    values: dict[str, str] = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {line!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    try:
        return GridConfig(
            origin_lat=float(values.pop("origin_lat")),
            origin_lon=float(values.pop("origin_lon")),
            cell_size_km=float(values.pop("cell_size_km")),
            n_rows=int(values.pop("n_rows")),
            n_cols=int(values.pop("n_cols")),
            moment_seconds=int(values.pop("moment_seconds")),
            day_start=int(values.pop("day_start")),
            day_end=int(values.pop("day_end")),
        )
    except KeyError as exc:
        raise ValueError(f"missing grid config key: {exc.args[0]}") from None


def write_grid_config(g: GridConfig, path: str | Path) -> None:
    lines = [
        f"origin_lat = {g.origin_lat!r}",
        f"origin_lon = {g.origin_lon!r}",
        f"cell_size_km = {g.cell_size_km!r}",
        f"n_rows = {g.n_rows}",
        f"n_cols = {g.n_cols}",
        f"moment_seconds = {g.moment_seconds}",
        f"day_start = {g.day_start}",
        f"day_end = {g.day_end}",
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_timestamp_iso(text: str) -> float:
    return datetime.fromisoformat(text).replace(tzinfo=timezone.utc).timestamp()


def read_raw_csv(path: str | Path) -> list[RawPoint]:
    """Read raw GPS points: header ``object_id,lat,lon,timestamp``.

    Timestamps are epoch seconds or ISO-8601; the format is detected once per
    file from the first data row.
    """
    points: list[RawPoint] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        parse = None
        for row in reader:
            if parse is None:
                try:
                    float(row["timestamp"])
                    parse = float
                except ValueError:
                    parse = _parse_timestamp_iso
            points.append(
                RawPoint(
                    object_id=row["object_id"],
                    lat=float(row["lat"]),
                    lon=float(row["lon"]),
                    timestamp=parse(row["timestamp"]),
                )
            )
    return points


def write_discrete_csv(trajectories: Iterable[DiscreteTrajectory], path: str | Path) -> None:
    """Write gap-free trajectories: header ``object_id,day_id,m0,m1,...``."""
    trajectories = list(trajectories)
    if not trajectories:
        raise ValueError("nothing to write")
    n_moments = len(trajectories[0].cells)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["object_id", "day_id"] + [f"m{i}" for i in range(n_moments)])
        for t in trajectories:
            if len(t.cells) != n_moments:
                raise ValueError("mixed window lengths")
            if not t.is_complete:
                raise ValueError(f"trajectory {t.object_id}/{t.day_id} still has gaps")
            writer.writerow([t.object_id, t.day_id] + [str(c) for c in t.cells])


def read_discrete_csv(path: str | Path) -> list[DiscreteTrajectory]:
    trajectories: list[DiscreteTrajectory] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != ["object_id", "day_id"]:
            raise ValueError("expected header object_id,day_id,m0,...")
        for row in reader:
            cells = tuple(int(c) for c in row[2:])
            trajectories.append(DiscreteTrajectory(row[0], row[1], cells))
    return trajectories
