"""Command-line interface.

Subcommands cover the whole pipeline: ``synth`` generates a corpus, ``prep``
turns raw GPS points into repaired discrete trajectories, ``track`` runs one
strategy on one episode, and ``bench`` runs the full experiment grid, writing
the report CSV plus figures.
"""

from __future__ import annotations

import argparse
import sys
from collections import defaultdict

from . import bench as bench_mod
from . import figures
from .corpus import UnitConstraint, build_corpus
from .grid import (
    discretize,
    read_discrete_csv,
    read_grid_config,
    read_raw_csv,
    repair,
    write_discrete_csv,
)
from .oracle import SearchSession, dump_log
from .strategies import (
    STRATEGY_NAMES,
    Episode,
    format_steps,
    run_strategy,
    write_episode_csv,
)
from .synth import SynthParams, synth


def _cmd_synth(args: argparse.Namespace) -> int:
    grid = read_grid_config(args.grid)
    params = SynthParams(
        grid=grid,
        n_objects=args.objects,
        n_days=args.days,
        persistence=args.persistence,
        seed=args.seed,
    )
    trajectories = synth(params)
    write_discrete_csv(trajectories, args.out)
    print(f"wrote {len(trajectories)} trajectories to {args.out}")
    return 0


def _cmd_prep(args: argparse.Namespace) -> int:
    grid = read_grid_config(args.grid)
    points = read_raw_csv(args.raw)
    by_day = defaultdict(list)
    for p in points:
        by_day[(p.object_id, int(p.timestamp // 86400))].append(p)
    kept, dropped = [], 0
    for group in by_day.values():
        group.sort(key=lambda p: p.timestamp)
        repaired = repair(discretize(group, grid), grid)
        if repaired is None:
            dropped += 1
        else:
            kept.append(repaired)
    if not kept:
        print("no trajectory survived preprocessing", file=sys.stderr)
        return 1
    write_discrete_csv(kept, args.out)
    total = len(kept) + dropped
    print(
        f"retained {len(kept)}/{total} object-days "
        f"({100.0 * len(kept) / total:.1f}%) -> {args.out}"
    )
    return 0


def _cmd_track(args: argparse.Namespace) -> int:
    train_trajectories = read_discrete_csv(args.train)
    truths = read_discrete_csv(args.truth)
    if not truths:
        print("truth file is empty", file=sys.stderr)
        return 1
    truth = truths[0]
    if len(truths) > 1:
        print(f"truth file has {len(truths)} rows, using the first", file=sys.stderr)
    n_locations = 1 + max(
        max(t.cells) for t in train_trajectories + [truth]
    )
    train = build_corpus(train_trajectories, n_locations=n_locations)
    if truth.cells[args.start_moment] != args.start_loc:
        print(
            f"witnessed location {args.start_loc} does not match the truth "
            f"({truth.cells[args.start_moment]}) at moment {args.start_moment}",
            file=sys.stderr,
        )
        return 1
    session = SearchSession(truth)
    episode = Episode(
        UnitConstraint(args.start_loc, args.start_moment),
        args.end_moment,
        train,
        session,
    )
    result = run_strategy(args.strategy, episode, args.predictor, args.ipm_mid)
    print(f"found location {result.found_location} with {result.total_searches} searches")
    for moment, spent, hit in result.steps:
        outcome = f"hit {hit}" if hit is not None else "miss"
        print(f"  moment {moment}: {spent} search(es), {outcome}")
    if args.out:
        write_episode_csv(
            [
                {
                    "strategy": args.strategy,
                    "object_id": truth.object_id,
                    "day_id": truth.day_id,
                    "t_p": args.start_moment,
                    "t_x": args.end_moment,
                    "start_loc": args.start_loc,
                    "found_loc": result.found_location,
                    "total_searches": result.total_searches,
                    "steps": format_steps(result.steps),
                }
            ],
            args.out,
        )
        print(f"wrote episode result to {args.out}")
    if args.audit:
        dump_log(session, args.audit)
        print(f"wrote search audit log to {args.audit}")
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    spec = bench_mod.parse_experiment_spec(args.spec)
    train_trajectories = read_discrete_csv(args.train)
    test_trajectories = read_discrete_csv(args.test)
    n_locations = 1 + max(
        max(t.cells) for t in train_trajectories + test_trajectories
    )
    train = build_corpus(train_trajectories, n_locations=n_locations)
    test = build_corpus(test_trajectories, n_locations=n_locations)
    result = bench_mod.run_experiment(
        spec, train, test, threads=args.threads, seed=args.seed, verbose=True
    )
    bench_mod.write_report_csv(result.rows, args.out)
    print(f"wrote {len(result.rows)} report rows to {args.out}")
    if args.episodes:
        write_episode_csv(
            [
                {
                    "strategy": e.strategy,
                    "object_id": e.object_id,
                    "day_id": e.day_id,
                    "t_p": e.t_p,
                    "t_x": e.t_x,
                    "start_loc": e.start_loc,
                    "found_loc": e.found_loc,
                    "total_searches": e.total_searches,
                    "steps": e.steps,
                }
                for e in result.episodes
            ],
            args.episodes,
        )
        print(f"wrote {len(result.episodes)} episode rows to {args.episodes}")
    if not args.no_figures:
        for path in figures.render_report_figures(result.rows, args.out):
            print(f"wrote figure {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stsearch",
        description="Track a disappeared object over a city grid with the fewest searches.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a synthetic trajectory corpus")
    p_synth.add_argument("--grid", required=True, help="grid config file")
    p_synth.add_argument("--objects", type=int, required=True)
    p_synth.add_argument("--days", type=int, required=True)
    p_synth.add_argument("--persistence", type=float, default=0.8)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", required=True, help="discrete trajectory CSV")
    p_synth.set_defaults(func=_cmd_synth)

    p_prep = sub.add_parser("prep", help="discretize and repair raw GPS points")
    p_prep.add_argument("--grid", required=True)
    p_prep.add_argument("--raw", required=True, help="object_id,lat,lon,timestamp CSV")
    p_prep.add_argument("--out", required=True)
    p_prep.set_defaults(func=_cmd_prep)

    p_track = sub.add_parser("track", help="run one strategy on one episode")
    p_track.add_argument("--train", required=True, help="training trajectory CSV")
    p_track.add_argument("--truth", required=True, help="single-trajectory CSV")
    p_track.add_argument("--strategy", choices=STRATEGY_NAMES, required=True)
    p_track.add_argument("--start-loc", type=int, required=True)
    p_track.add_argument("--start-moment", type=int, required=True)
    p_track.add_argument("--end-moment", type=int, required=True)
    p_track.add_argument("--ipm-mid", type=int, default=None)
    p_track.add_argument("--predictor", choices=("first", "second"), default="first")
    p_track.add_argument("--out", default=None, help="episode result CSV")
    p_track.add_argument("--audit", default=None, help="search audit-log CSV")
    p_track.set_defaults(func=_cmd_track)

    p_bench = sub.add_parser("bench", help="run an experiment grid")
    p_bench.add_argument("--spec", required=True, help="experiment config file")
    p_bench.add_argument("--train", required=True)
    p_bench.add_argument("--test", required=True)
    p_bench.add_argument("--out", required=True, help="report CSV")
    p_bench.add_argument("--threads", type=int, default=1)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--episodes", default=None, help="per-episode log CSV")
    p_bench.add_argument("--no-figures", action="store_true")
    p_bench.set_defaults(func=_cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
