"""Docking-score analytics: cohort summaries, reference comparisons, triage.

Scores are energy-like (lower = stronger predicted binding). Reference
cohorts conventionally use the labels ``reference-full`` and
``reference-hitlike``; generated cohorts follow "Algorithm (TrainingSet)"
so per-algorithm aggregation can strip the parenthetical.

Triage keeps candidates that are (1) structurally novel, nearest-binder
Tanimoto distance >= td_min, and (2) strongly scored, score strictly below
mean - z*sd of the candidate cohort itself. Both boundaries are strict and
the potency reference is the candidate distribution (switchable).
"""

from __future__ import annotations

import csv
import logging
import math
import statistics
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .evalmetrics import EmptySample, kl_divergence
from .fingerprints import Fingerprint, tanimoto

logger = logging.getLogger(__name__)

EXPECTED_HEADER = ["molecule_id", "target", "cohort", "score"]


class MalformedRow(ValueError):
    def __init__(self, line: int, detail: str):
        self.line = line
        super().__init__(f"line {line}: {detail}")


class UnknownHeader(ValueError):
    pass


class NoRecords(ValueError):
    pass


class EmptyKnownSet(ValueError):
    pass


class TooFewForStats(ValueError):
    pass


@dataclass(frozen=True)
class ScoreRecord:
    molecule_id: str
    target_id: str
    cohort: str
    score: float


def load_scores(path) -> list[ScoreRecord]:
    """Read a scores CSV; duplicates keep the best (lowest) score."""
    best: dict[tuple[str, str, str], ScoreRecord] = {}
    order: list[tuple[str, str, str]] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise UnknownHeader(f"{path}: empty file")
        if [h.strip().lower() for h in header] != EXPECTED_HEADER:
            raise UnknownHeader(f"{path}: expected header {','.join(EXPECTED_HEADER)}")
        for line_no, row in enumerate(reader, 2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 4:
                raise MalformedRow(line_no, f"expected 4 columns, got {len(row)}")
            molecule_id, target, cohort, raw_score = (cell.strip() for cell in row)
            if not cohort:
                raise MalformedRow(line_no, "empty cohort label")
            try:
                score = float(raw_score)
            except ValueError:
                raise MalformedRow(line_no, f"bad score {raw_score!r}")
            if not math.isfinite(score):
                raise MalformedRow(line_no, f"non-finite score {raw_score!r}")
            key = (molecule_id, target, cohort)
            record = ScoreRecord(molecule_id, target, cohort, score)
            if key in best:
                if score < best[key].score:
                    logger.info(
                        "duplicate %s: keeping better score %.3f over %.3f",
                        key, score, best[key].score,
                    )
                    best[key] = record
            else:
                best[key] = record
                order.append(key)
    return [best[key] for key in order]


def cohort_scores(records: Iterable[ScoreRecord], target: str, cohort: str) -> list[float]:
    return [r.score for r in records if r.target_id == target and r.cohort == cohort]


@dataclass(frozen=True)
class TargetSummary:
    target_id: str
    cohort: str
    median: float
    mean: float
    sd: float
    n: int


def summarize(records: Iterable[ScoreRecord], target: str, cohort: str) -> TargetSummary:
    scores = cohort_scores(records, target, cohort)
    if not scores:
        raise NoRecords(f"no records for target={target!r} cohort={cohort!r}")
    return TargetSummary(
        target_id=target,
        cohort=cohort,
        median=statistics.median(scores),
        mean=statistics.fmean(scores),
        sd=statistics.stdev(scores) if len(scores) > 1 else 0.0,
        n=len(scores),
    )


def fraction_better(gen_scores: Sequence[float], ref_median: float) -> float:
    """Percentage of generated scores strictly below the reference median."""
    if not gen_scores:
        raise EmptySample("fraction_better over an empty sample")
    return 100.0 * sum(1 for s in gen_scores if s < ref_median) / len(gen_scores)


def compare_cohorts(
    records: Iterable[ScoreRecord], target: str, gen_cohort: str, ref_cohort: str
) -> dict:
    records = list(records)
    gen = cohort_scores(records, target, gen_cohort)
    ref = cohort_scores(records, target, ref_cohort)
    if not gen or not ref:
        raise NoRecords(f"missing cohort for target={target!r}")
    ref_median = statistics.median(ref)
    return {
        "target": target,
        "gen_cohort": gen_cohort,
        "ref_cohort": ref_cohort,
        "kl": kl_divergence(gen, ref),
        "median_ref": ref_median,
        "pct_better": fraction_better(gen, ref_median),
        "n_gen": len(gen),
        "n_ref": len(ref),
    }


def algorithm_of(cohort: str) -> str:
    """Strip the training-set parenthetical from "Algorithm (TrainingSet)"."""
    return cohort.split(" (", 1)[0].strip()


def aggregate_kl(
    records: Iterable[ScoreRecord],
    ref_cohort: str,
    by_algorithm: bool = False,
) -> list[dict]:
    """Mean +- sample sd of per-target KL values, grouped by cohort or
    by algorithm (unweighted over (cohort, target) pairs)."""
    records = list(records)
    targets = sorted({r.target_id for r in records})
    cohorts = sorted(
        {r.cohort for r in records if not r.cohort.startswith("reference")}
    )
    per_group: dict[str, list[float]] = {}
    for cohort in cohorts:
        group = algorithm_of(cohort) if by_algorithm else cohort
        for target in targets:
            gen = cohort_scores(records, target, cohort)
            ref = cohort_scores(records, target, ref_cohort)
            if not gen or not ref:
                continue
            per_group.setdefault(group, []).append(kl_divergence(gen, ref))
    rows = []
    for group in sorted(per_group):
        values = per_group[group]
        rows.append(
            {
                "group": group,
                "kl_mean": statistics.fmean(values),
                "kl_sd": statistics.stdev(values) if len(values) > 1 else 0.0,
                "n": len(values),
            }
        )
    return rows


def median_table(
    records: Iterable[ScoreRecord],
    full_cohort: str = "reference-full",
    hitlike_cohort: str = "reference-hitlike",
) -> list[dict]:
    """Per-(cohort, target) medians and %-better against both reference
    variants; row keys match the dual-median report layout."""
    records = list(records)
    targets = sorted({r.target_id for r in records})
    cohorts = sorted(
        {r.cohort for r in records if not r.cohort.startswith("reference")}
    )
    rows = []
    for cohort in cohorts:
        for target in targets:
            gen = cohort_scores(records, target, cohort)
            if not gen:
                continue
            row: dict[str, object] = {"Experiment": cohort, "Target": target}
            for label, ref_name in (("Full", full_cohort), ("Hit-like", hitlike_cohort)):
                ref = cohort_scores(records, target, ref_name)
                if ref:
                    ref_median = statistics.median(ref)
                    row[f"Median ({label})"] = ref_median
                    row[f"% Better ({label})"] = fraction_better(gen, ref_median)
                else:
                    row[f"Median ({label})"] = None
                    row[f"% Better ({label})"] = None
            rows.append(row)
    return rows


# -- hit triage --------------------------------------------------------------


@dataclass(frozen=True)
class TriageConfig:
    td_min: float = 0.5
    z: float = 2.0
    max_candidates: int | None = None
    potency_reference: str = "candidates"  # or "reference"

    def __post_init__(self):
        if not 0.0 <= self.td_min <= 1.0:
            raise ValueError("td_min must lie in [0, 1]")
        if self.z <= 0:
            raise ValueError("z must be positive")


@dataclass(frozen=True)
class TriageCandidate:
    molecule_id: str
    fingerprint: Fingerprint
    score: float
    sa_score: float | None = None


@dataclass(frozen=True)
class TriageHit:
    molecule_id: str
    score: float
    z_margin: float
    nearest_binder_id: str
    tanimoto_distance: float
    sa_score: float | None


def triage(
    candidates: Sequence[TriageCandidate],
    known_binders: Sequence[tuple[str, Fingerprint]],
    config: TriageConfig | None = None,
    reference_scores: Sequence[float] | None = None,
) -> list[TriageHit]:
    """Novelty + potency gate, survivors ranked by ascending score."""
    config = config or TriageConfig()
    if not known_binders:
        raise EmptyKnownSet("triage requires at least one known binder")
    if not candidates:
        return []
    if config.potency_reference == "reference":
        if not reference_scores:
            raise NoRecords("potency_reference='reference' needs reference scores")
        pool = list(reference_scores)
    else:
        pool = [c.score for c in candidates]
    if len(pool) < 3:
        raise TooFewForStats("mean - z*sd needs at least three scores")
    threshold = statistics.fmean(pool) - config.z * statistics.stdev(pool)
    hits: list[TriageHit] = []
    for candidate in candidates:
        nearest_id, nearest_sim = max(
            ((bid, tanimoto(candidate.fingerprint, bfp)) for bid, bfp in known_binders),
            key=lambda pair: pair[1],
        )
        distance = 1.0 - nearest_sim
        if distance < config.td_min:
            continue
        if not candidate.score < threshold:
            continue
        hits.append(
            TriageHit(
                molecule_id=candidate.molecule_id,
                score=candidate.score,
                z_margin=threshold - candidate.score,
                nearest_binder_id=nearest_id,
                tanimoto_distance=distance,
                sa_score=candidate.sa_score,
            )
        )
    hits.sort(key=lambda h: h.score)
    if config.max_candidates is not None:
        hits = hits[: config.max_candidates]
    return hits
