"""Static SVG figures for the report path.

All figures render through the Agg backend with a fixed svg.hashsalt and
stripped date metadata, so reruns produce byte-identical files.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "hitgate"

_GEN_COLOR = "#d95f02"
_REF_COLOR = "#1b9e77"


def _save(fig, path, manifest_digest: str | None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    if manifest_digest:
        text = path.read_text(encoding="utf-8")
        text = text.replace(
            "</svg>", f"<!-- manifest: {manifest_digest} -->\n</svg>", 1
        )
        path.write_text(text, encoding="utf-8")


def score_histogram(
    gen_scores: Sequence[float],
    ref_scores: Sequence[float],
    gen_label: str,
    ref_label: str,
    title: str,
    path,
    manifest_digest: str | None = None,
) -> None:
    """Overlayed docking-score histograms for one (target, cohort) pair."""
    fig, ax = plt.subplots(figsize=(6, 4))
    lo = min(min(gen_scores), min(ref_scores))
    hi = max(max(gen_scores), max(ref_scores))
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    bins = 30
    ax.hist(ref_scores, bins=bins, range=(lo, hi), alpha=0.55, density=True,
            label=ref_label, color=_REF_COLOR)
    ax.hist(gen_scores, bins=bins, range=(lo, hi), alpha=0.55, density=True,
            label=gen_label, color=_GEN_COLOR)
    ax.set_xlabel("docking score")
    ax.set_ylabel("density")
    ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    _save(fig, path, manifest_digest)


def activity_violin(
    reference_values: Sequence[float],
    subset_values: Sequence[float],
    highlight: float | None,
    title: str,
    path,
    manifest_digest: str | None = None,
) -> None:
    """Violin of a reference activity distribution with an optional
    hit-like subset strip and a highlighted candidate marker."""
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    parts = ax.violinplot([list(reference_values)], positions=[0], showmedians=True)
    for body in parts["bodies"]:
        body.set_facecolor(_REF_COLOR)
        body.set_alpha(0.4)
    if subset_values:
        ax.plot(
            [0.0] * len(subset_values),
            list(subset_values),
            linestyle="none",
            marker="o",
            markersize=4,
            color="#33508c",
            alpha=0.8,
            label="hit-like subset",
        )
    if highlight is not None:
        ax.plot([0.0], [highlight], linestyle="none", marker="*", markersize=16,
                color="#c02020", label="candidate")
    ax.set_xticks([])
    ax.set_ylabel("activity")
    ax.set_title(title)
    ax.legend(frameon=False, loc="lower right")
    fig.tight_layout()
    _save(fig, path, manifest_digest)
