"""Experiment driver.

Runs a set of strategies over every test trajectory under one of three
settings: sweep the start moment at a fixed horizon, sweep the end moment
from a fixed start, or group episodes by how busy the start location is in
the training data.  Results aggregate into one report row per (setting key,
strategy) cell; episodes whose start unit never occurs in training run on
pure uniform predictions throughout and are counted separately per cell.
"""

from __future__ import annotations

import csv
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .corpus import Corpus, UnitConstraint
from .grid import DiscreteTrajectory
from .oracle import SearchSession
from .predict import RankedPrediction
from .strategies import Episode, format_steps, run_strategy

SETTINGS = ("sweep-start", "sweep-end", "busyness-groups")


@dataclass(frozen=True)
class ExperimentSpec:
    """Parameters of one experiment run."""

    setting: str
    delta_t: int = 30
    start_moments: tuple[int, ...] = ()
    end_moments: tuple[int, ...] = ()
    strategies: tuple[str, ...] = ("alt", "ipm", "iem", "ihms", "ihus")
    predictor: str = "first"
    busyness_k: int = 4
    max_episodes: int = 0  # per cell; 0 keeps every test trajectory
    ipm_mid: Optional[int] = None  # None picks the midpoint

    def __post_init__(self) -> None:
        if self.setting not in SETTINGS:
            raise ValueError(f"unknown setting: {self.setting!r}")
        if not self.strategies:
            raise ValueError("strategy set is empty")


@dataclass(frozen=True)
class ReportRow:
    """Aggregate of one (setting key, strategy) cell."""

    setting: str
    key: int
    strategy: str
    mean_searches: float
    std_searches: float
    episodes: int
    unseen_start_episodes: int


@dataclass(frozen=True)
class EpisodeRecord:
    """One executed episode, in the episode-dump column layout."""

    setting: str
    key: int
    strategy: str
    object_id: str
    day_id: str
    t_p: int
    t_x: int
    start_loc: int
    found_loc: int
    total_searches: int
    steps: str
    unseen_start: bool


@dataclass
class BenchResult:
    rows: list[ReportRow]
    episodes: list[EpisodeRecord] = field(default_factory=list)


def top_n_accuracy(ranked: RankedPrediction, truth_loc: int, n: int) -> int:
    """1 when the true location appears among the first n ranked locations."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return int(truth_loc in ranked.order[:n])


def parse_experiment_spec(path: str | Path) -> ExperimentSpec:
    """Read a flat key-value experiment config."""
    values: dict[str, str] = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {line!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()

    def moments(key: str) -> tuple[int, ...]:
        raw = values.get(key, "")
        return tuple(int(v) for v in raw.split(",") if v.strip() != "")

    return ExperimentSpec(
        setting=values.get("setting", "sweep-start"),
        delta_t=int(values.get("delta_t", 30)),
        start_moments=moments("start_moments"),
        end_moments=moments("end_moments"),
        strategies=tuple(
            s.strip() for s in values.get("strategies", "alt,ipm,iem,ihms,ihus").split(",")
        ),
        predictor=values.get("predictor", "first"),
        busyness_k=int(values.get("busyness_k", 4)),
        max_episodes=int(values.get("max_episodes", 0)),
        ipm_mid=int(values["ipm_mid"]) if "ipm_mid" in values else None,
    )


def _cells_for(spec: ExperimentSpec, n_moments: int) -> list[tuple[int, int, int]]:
    """(key, t_p, t_x) triples of the requested setting."""
    if spec.setting == "sweep-start":
        if not spec.start_moments:
            raise ValueError("sweep-start needs start_moments")
        cells = [(t_p, t_p, t_p + spec.delta_t) for t_p in spec.start_moments]
    elif spec.setting == "sweep-end":
        if len(spec.start_moments) != 1 or not spec.end_moments:
            raise ValueError("sweep-end needs one start moment and end_moments")
        t_p = spec.start_moments[0]
        cells = [(t_x, t_p, t_x) for t_x in spec.end_moments]
    else:  # busyness-groups; key is injected per episode later
        if len(spec.start_moments) != 1:
            raise ValueError("busyness-groups needs one start moment")
        t_p = spec.start_moments[0]
        t_x = spec.end_moments[0] if spec.end_moments else t_p + spec.delta_t
        cells = [(-1, t_p, t_x)]
    for _, t_p, t_x in cells:
        if not 0 <= t_p < t_x <= n_moments - 1:
            raise ValueError(f"episode window ({t_p}, {t_x}] outside the corpus window")
    return cells


def _select_test(
    test: Corpus, max_episodes: int, seed: int
) -> list[DiscreteTrajectory]:
    trajectories = test.trajectories
    if max_episodes and len(trajectories) > max_episodes:
        rng = np.random.default_rng(seed)
        picked = rng.choice(len(trajectories), size=max_episodes, replace=False)
        trajectories = [trajectories[i] for i in sorted(picked)]
    return trajectories


def run_experiment(
    spec: ExperimentSpec,
    train: Corpus,
    test: Corpus,
    threads: int = 1,
    seed: int = 0,
    verbose: bool = False,
) -> BenchResult:
    """Run every (cell, test trajectory, strategy) episode and aggregate.

    Episodes are independent; with ``threads > 1`` they fan out over a worker
    pool and results land in a preallocated slot per episode, so reports are
    identical to the single-threaded run.
    """
    if train.n_moments != test.n_moments:
        raise ValueError("train and test windows differ")
    if len(test) == 0:
        raise ValueError("test corpus is empty")
    plan = _cells_for(spec, train.n_moments)
    groups = (
        train.busyness_groups(spec.busyness_k)
        if spec.setting == "busyness-groups"
        else None
    )
    chosen = _select_test(test, spec.max_episodes, seed)

    tasks = []
    for key, t_p, t_x in plan:
        for truth in chosen:
            start = UnitConstraint(truth.cells[t_p], t_p)
            episode_key = groups[start.location] if groups is not None else key
            unseen = train.count_matching([start]) == 0
            for strategy in spec.strategies:
                tasks.append((episode_key, t_p, t_x, truth, start, unseen, strategy))

    def execute(task) -> EpisodeRecord:
        key, t_p, t_x, truth, start, unseen, strategy = task
        episode = Episode(start, t_x, train, SearchSession(truth))
        result = run_strategy(strategy, episode, spec.predictor, spec.ipm_mid)
        if result.total_searches != episode.session.cost():
            raise RuntimeError("episode cost out of sync with the oracle meter")
        return EpisodeRecord(
            setting=spec.setting,
            key=key,
            strategy=strategy,
            object_id=truth.object_id,
            day_id=truth.day_id,
            t_p=t_p,
            t_x=t_x,
            start_loc=start.location,
            found_loc=result.found_location,
            total_searches=result.total_searches,
            steps=format_steps(result.steps),
            unseen_start=unseen,
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            episodes = list(pool.map(execute, tasks))
    else:
        episodes = [execute(t) for t in tasks]

    cells: dict[tuple[int, str], list[EpisodeRecord]] = {}
    for record in episodes:
        cells.setdefault((record.key, record.strategy), []).append(record)
    rows = []
    for (key, strategy) in sorted(cells):
        records = cells[(key, strategy)]
        costs = [r.total_searches for r in records]
        rows.append(
            ReportRow(
                setting=spec.setting,
                key=key,
                strategy=strategy,
                mean_searches=statistics.fmean(costs),
                std_searches=statistics.pstdev(costs),
                episodes=len(records),
                unseen_start_episodes=sum(r.unseen_start for r in records),
            )
        )
        if verbose:
            row = rows[-1]
            print(
                f"{spec.setting} key={row.key} {row.strategy}: "
                f"mean={row.mean_searches:.2f} std={row.std_searches:.2f} "
                f"n={row.episodes}"
            )
    return BenchResult(rows, episodes)


REPORT_FIELDS = [
    "setting",
    "key",
    "strategy",
    "mean_searches",
    "std_searches",
    "episodes",
    "unseen_start_episodes",
]


def write_report_csv(rows: Sequence[ReportRow], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_FIELDS)
        for r in rows:
            writer.writerow(
                [
                    r.setting,
                    r.key,
                    r.strategy,
                    repr(r.mean_searches),
                    repr(r.std_searches),
                    r.episodes,
                    r.unseen_start_episodes,
                ]
            )


def read_report_csv(path: str | Path) -> list[ReportRow]:
    rows = []
    with open(path, newline="") as fh:
        for record in csv.DictReader(fh):
            rows.append(
                ReportRow(
                    setting=record["setting"],
                    key=int(record["key"]),
                    strategy=record["strategy"],
                    mean_searches=float(record["mean_searches"]),
                    std_searches=float(record["std_searches"]),
                    episodes=int(record["episodes"]),
                    unseen_start_episodes=int(record["unseen_start_episodes"]),
                )
            )
    return rows
