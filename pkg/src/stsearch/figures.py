"""Figure rendering for benchmark reports.

One PNG per setting: mean searches against the setting key, one line per
strategy, shaded by one standard deviation.  Written next to the report CSV
so a bench run leaves both the numbers and the picture.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .bench import ReportRow

_KEY_LABEL = {
    "sweep-start": "start moment",
    "sweep-end": "end moment",
    "busyness-groups": "start-location busyness group",
}


def render_report_figures(
    rows: Sequence[ReportRow], out_base: str | Path, dpi: int = 120
) -> list[Path]:
    """Render one figure per setting found in ``rows``.

    ``out_base`` is the report path; figures land next to it as
    ``<stem>_<setting>.png``.  Returns the written paths.
    """
    out_base = Path(out_base)
    paths = []
    for setting in sorted({r.setting for r in rows}):
        subset = [r for r in rows if r.setting == setting]
        strategies = sorted({r.strategy for r in subset})
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for strategy in strategies:
            points = sorted(
                (r.key, r.mean_searches, r.std_searches)
                for r in subset
                if r.strategy == strategy
            )
            keys = [p[0] for p in points]
            means = [p[1] for p in points]
            stds = [p[2] for p in points]
            ax.plot(keys, means, marker="o", markersize=3, label=strategy.upper())
            ax.fill_between(
                keys,
                [m - s for m, s in zip(means, stds)],
                [m + s for m, s in zip(means, stds)],
                alpha=0.12,
            )
        ax.set_xlabel(_KEY_LABEL.get(setting, "key"))
        ax.set_ylabel("mean searches")
        ax.set_title(f"searches by strategy ({setting})")
        ax.legend()
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        path = out_base.with_name(f"{out_base.stem}_{setting}.png")
        fig.savefig(path, dpi=dpi)
        plt.close(fig)
        paths.append(path)
    return paths
