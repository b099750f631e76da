"""Bench figures: mean solve time against net size, one line per algorithm."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bench import BenchRow  # noqa: E402
from .netfile import fmt_rational  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.frameon": False,
    "savefig.dpi": 150,
}
MARKERS = {"binsearch": "o", "milp": "s"}


def plot_bench(rows: Sequence[BenchRow], path: str | Path, title: str = "") -> Path:
    """Write a log-scale timing plot; format follows the file suffix."""
    path = Path(path)
    series = defaultdict(list)
    for r in rows:
        key = r.algorithm if len({x.resource_fraction for x in rows}) == 1 else f"{r.algorithm} @ {fmt_rational(r.resource_fraction)}"
        series[key].append(r)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 3.2))
        for key, pts in series.items():
            pts = sorted(pts, key=lambda r: r.size)
            ax.plot(
                [r.size for r in pts],
                [max(r.mean_seconds, 1e-6) for r in pts],
                marker=MARKERS.get(pts[0].algorithm, "^"),
                label=key,
            )
        labelled = {}
        for r in rows:
            labelled.setdefault(r.size, r.instance)
        ax.set_xticks(sorted(labelled))
        ax.set_xticklabels([labelled[s] for s in sorted(labelled)], rotation=45, ha="right")
        ax.set_yscale("log")
        ax.set_xlabel("instance (ordered by |P| + |T|)")
        ax.set_ylabel("mean time per solve [s]")
        if title:
            ax.set_title(title)
        ax.legend()
        fig.tight_layout()
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path)
        plt.close(fig)
    return path
