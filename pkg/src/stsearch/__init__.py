"""Track a disappeared object over a discretized city grid with the fewest
spatiotemporal searches: Markov mobility predictors, sweep-cost estimators,
five searching strategies, and a simulated camera-record oracle to meter
them against."""

from .bench import (
    BenchResult,
    EpisodeRecord,
    ExperimentSpec,
    ReportRow,
    run_experiment,
    top_n_accuracy,
)
from .corpus import Corpus, UnitConstraint, build_corpus
from .estimate import (
    CostEstimate,
    estimate_second_stage,
    expected_searches,
    moment_indicator,
    unit_indicator,
)
from .grid import (
    DiscreteTrajectory,
    GridConfig,
    RawPoint,
    assign_cell,
    discretize,
    repair,
)
from .oracle import SearchSession, dump_log
from .predict import (
    Evidence,
    PredictionVector,
    RankedPrediction,
    first_order,
    predict,
    rank,
    second_order,
    time_specific_first_order,
)
from .strategies import (
    Episode,
    TrackResult,
    run_alt,
    run_iem,
    run_ihms,
    run_ihus,
    run_ipm,
    run_strategy,
    sweep_moment,
)
from .synth import SynthParams, synth

__all__ = [
    "BenchResult",
    "Corpus",
    "CostEstimate",
    "DiscreteTrajectory",
    "Episode",
    "EpisodeRecord",
    "Evidence",
    "ExperimentSpec",
    "GridConfig",
    "PredictionVector",
    "RankedPrediction",
    "RawPoint",
    "ReportRow",
    "SearchSession",
    "SynthParams",
    "TrackResult",
    "UnitConstraint",
    "assign_cell",
    "build_corpus",
    "discretize",
    "dump_log",
    "estimate_second_stage",
    "expected_searches",
    "first_order",
    "moment_indicator",
    "predict",
    "rank",
    "repair",
    "run_alt",
    "run_experiment",
    "run_iem",
    "run_ihms",
    "run_ihus",
    "run_ipm",
    "run_strategy",
    "second_order",
    "sweep_moment",
    "synth",
    "time_specific_first_order",
    "top_n_accuracy",
    "unit_indicator",
]
