"""Set-level generation metrics: VUN, diversity, SNN, count-vector cosine,
Gaussian Frechet distance, and histogram KL divergence.

The Frechet computation runs over pluggable feature vectors: either
precomputed files (CSV ``id,f1..fd`` or the binary layout documented at
:data:`FEATURE_MAGIC`) or the built-in 10-dimensional physicochemical map
(:func:`physchem_features`). Neural featurizers are out of scope, so
absolute distances from the literature are not comparable; the computation
itself is exact.

KL divergence is directed KL(generated || reference), natural log, over a
shared equal-width binning of the union sample range (50 bins, 5% padding
per side, 1e-8 additive smoothing).
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .canon import write_smiles
from .mol import Molecule, check_validity, heavy_atom_count
from .smiles import SmilesError, parse_smiles
from .fingerprints import Fingerprint, morgan_fingerprint, tanimoto

logger = logging.getLogger(__name__)


class TooFewSamples(ValueError):
    pass


class EmptySet(ValueError):
    pass


class EmptySample(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class NonPSD(ValueError):
    def __init__(self, which: str, worst: float):
        self.which = which
        self.worst = worst
        super().__init__(f"covariance {which} is not PSD (worst eigenvalue {worst:.3e})")


# -- validity / uniqueness / novelty --------------------------------------


@dataclass(frozen=True)
class VunReport:
    n_generated: int
    valid_pct: float
    unique_pct: float
    novel_pct: float
    vun_pct: float
    n_valid: int = 0
    n_unique: int = 0
    n_novel: int = 0

    def as_json_dict(self) -> dict:
        return {
            "n_generated": self.n_generated,
            "valid_pct": self.valid_pct,
            "unique_pct": self.unique_pct,
            "novel_pct": self.novel_pct,
            "vun_pct": self.vun_pct,
            "n_valid": self.n_valid,
            "n_unique": self.n_unique,
            "n_novel": self.n_novel,
        }


def vun_from_keys(
    keys: Sequence[str | None],
    training_keys: set[str] | frozenset[str] = frozenset(),
) -> VunReport:
    """Aggregate a VUN report from ordered canonical keys (None = invalid).

    Uniqueness is the fraction of valid molecules carrying a first-seen
    canonical key; novelty is the fraction of those keys absent from the
    training set; vun_pct counts novel keys against everything generated.
    """
    n = len(keys)
    valid = [k for k in keys if k is not None]
    distinct = set(valid)
    novel = {k for k in distinct if k not in training_keys}
    return VunReport(
        n_generated=n,
        valid_pct=100.0 * len(valid) / n if n else 0.0,
        unique_pct=100.0 * len(distinct) / len(valid) if valid else 0.0,
        novel_pct=100.0 * len(novel) / len(distinct) if distinct else 0.0,
        vun_pct=100.0 * len(novel) / n if n else 0.0,
        n_valid=len(valid),
        n_unique=len(distinct),
        n_novel=len(novel),
    )


def canonical_key_or_none(smiles: str, reject_log: list | None = None, position: int = 0):
    """Canonical key for valid input, None (with an optional log entry)
    for unparsable or invalid input."""
    try:
        mol = parse_smiles(smiles)
    except (SmilesError, ValueError) as err:
        if reject_log is not None:
            reject_log.append((position, smiles, f"parse error: {err}"))
        return None
    report = check_validity(mol)
    if not report.valid:
        if reject_log is not None:
            reasons = "; ".join(why for _, why in report.violations[:3])
            reject_log.append((position, smiles, f"invalid: {reasons}"))
        return None
    return write_smiles(mol)


def vun(
    generated: Sequence[str],
    training_keys: set[str] | frozenset[str] = frozenset(),
    reject_log: list | None = None,
) -> VunReport:
    """Valid / unique / novel percentages over a generated SMILES list."""
    keys = [
        canonical_key_or_none(smiles, reject_log, position)
        for position, smiles in enumerate(generated)
    ]
    return vun_from_keys(keys, training_keys)


# -- fingerprint-set metrics ----------------------------------------------


def internal_diversity(fps: Sequence[Fingerprint]) -> float:
    """1 - mean pairwise Tanimoto, self-pairs excluded."""
    n = len(fps)
    if n < 2:
        raise TooFewSamples("internal diversity needs at least two fingerprints")
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            total += tanimoto(fps[i], fps[j])
    return 1.0 - total / (n * (n - 1) / 2)


def snn(gen_fps: Sequence[Fingerprint], ref_fps: Sequence[Fingerprint]) -> float:
    """Mean over generated of the maximum Tanimoto to any reference."""
    if not gen_fps or not ref_fps:
        raise EmptySet("snn needs non-empty generated and reference sets")
    total = 0.0
    for fp in gen_fps:
        total += max(tanimoto(fp, ref) for ref in ref_fps)
    return total / len(gen_fps)


def frequency_cosine(gen_counts: dict[str, int], ref_counts: dict[str, int]) -> float:
    """Cosine similarity between count vectors over the union key space."""
    if not gen_counts and not ref_counts:
        return 1.0
    if not gen_counts or not ref_counts:
        return 0.0
    dot = sum(count * ref_counts.get(key, 0) for key, count in gen_counts.items())
    norm_gen = sum(c * c for c in gen_counts.values()) ** 0.5
    norm_ref = sum(c * c for c in ref_counts.values()) ** 0.5
    return dot / (norm_gen * norm_ref)


# -- Gaussian Frechet distance ---------------------------------------------


@dataclass(frozen=True)
class GaussianSummary:
    mean: np.ndarray
    covariance: np.ndarray
    n: int


def fit_gaussian(features: Sequence[Sequence[float]]) -> GaussianSummary:
    data = np.asarray(features, dtype=float)
    if data.ndim != 2:
        raise DimensionMismatch("feature rows must share one dimension")
    if data.shape[0] < 2:
        raise TooFewSamples("need at least two feature vectors")
    mean = data.mean(axis=0)
    cov = np.cov(data, rowvar=False, ddof=1)
    cov = np.atleast_2d(cov)
    cov = (cov + cov.T) / 2.0
    return GaussianSummary(mean=mean, covariance=cov, n=data.shape[0])


def _psd_sqrt(matrix: np.ndarray, label: str, tolerance_scale: float) -> np.ndarray:
    eigenvalues, vectors = np.linalg.eigh(matrix)
    worst = float(eigenvalues.min())
    if worst < -tolerance_scale:
        raise NonPSD(label, worst)
    if worst < 0:
        logger.debug("clamping %s eigenvalues by %.3e", label, -worst)
    clamped = np.clip(eigenvalues, 0.0, None)
    return (vectors * np.sqrt(clamped)) @ vectors.T


def frechet_distance(g1: GaussianSummary, g2: GaussianSummary) -> float:
    """|mu1-mu2|^2 + Tr(S1 + S2 - 2 (S1^1/2 S2 S1^1/2)^1/2), clamped at 0."""
    if g1.mean.shape != g2.mean.shape:
        raise DimensionMismatch(f"{g1.mean.shape} vs {g2.mean.shape}")
    tolerance1 = 1e-6 * max(abs(np.trace(g1.covariance)), 1.0)
    tolerance2 = 1e-6 * max(abs(np.trace(g2.covariance)), 1.0)
    sqrt1 = _psd_sqrt(g1.covariance, "first", tolerance1)
    inner = sqrt1 @ g2.covariance @ sqrt1
    inner = (inner + inner.T) / 2.0
    cross = _psd_sqrt(inner, "cross", max(tolerance1, tolerance2))
    diff = g1.mean - g2.mean
    value = float(
        diff @ diff + np.trace(g1.covariance + g2.covariance - 2.0 * cross)
    )
    return max(0.0, value)


# -- histogram KL ----------------------------------------------------------


@dataclass(frozen=True)
class Histogram:
    edges: tuple[float, ...]
    masses: tuple[float, ...]
    smoothing_eps: float

    def __post_init__(self):
        if len(self.masses) != len(self.edges) - 1:
            raise ValueError("need exactly one mass per bin")
        if abs(sum(self.masses) - 1.0) > 1e-9:
            raise ValueError("masses must sum to 1")


def shared_edges(
    sample_p: Sequence[float], sample_q: Sequence[float], bins: int = 50, padding: float = 0.05
) -> tuple[float, ...]:
    lo = min(min(sample_p), min(sample_q))
    hi = max(max(sample_p), max(sample_q))
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    span = hi - lo
    lo -= padding * span
    hi += padding * span
    return tuple(np.linspace(lo, hi, bins + 1))


def build_histogram(
    sample: Sequence[float], edges: Sequence[float], eps: float = 1e-8
) -> Histogram:
    counts, _ = np.histogram(np.asarray(sample, dtype=float), bins=np.asarray(edges))
    masses = counts.astype(float) + eps
    masses /= masses.sum()
    return Histogram(edges=tuple(edges), masses=tuple(masses), smoothing_eps=eps)


def kl_divergence(
    sample_p: Sequence[float],
    sample_q: Sequence[float],
    bins: int = 50,
    padding: float = 0.05,
    eps: float = 1e-8,
) -> float:
    """KL(P||Q) with P = generated, Q = reference; natural log; >= 0."""
    if len(sample_p) == 0 or len(sample_q) == 0:
        raise EmptySample("kl_divergence needs non-empty samples")
    edges = shared_edges(sample_p, sample_q, bins=bins, padding=padding)
    p = np.asarray(build_histogram(sample_p, edges, eps).masses)
    q = np.asarray(build_histogram(sample_q, edges, eps).masses)
    return float(max(0.0, np.sum(p * np.log(p / q))))


def kl_between_histograms(p: Histogram, q: Histogram) -> float:
    if p.edges != q.edges:
        raise DimensionMismatch("histograms must share bin edges")
    pm = np.asarray(p.masses)
    qm = np.asarray(q.masses)
    return float(max(0.0, np.sum(pm * np.log(pm / qm))))


# -- feature vectors --------------------------------------------------------

FEATURE_MAGIC = b"HITGFEAT"  # magic, uint32 dim, uint64 count, float64 LE rows


def physchem_features(mol: Molecule) -> list[float]:
    """Built-in 10-dimensional physicochemical feature map."""
    from .descriptors import UnclassifiableAtom, crippen_logp, molecular_weight, ring_stats
    from .sascore import sa_score

    stats = ring_stats(mol)
    heavy = heavy_atom_count(mol)
    aromatic = sum(1 for a in mol.atoms if a.aromatic)
    hetero = sum(
        1 for a in mol.atoms if a.element.atomic_number > 1 and a.element.symbol != "C"
    )
    try:
        logp = crippen_logp(mol)
    except UnclassifiableAtom:
        logp = 0.0
    fp = morgan_fingerprint(mol)
    return [
        molecular_weight(mol),
        logp,
        sa_score(mol),
        float(stats.ring_count),
        float(stats.max_ring_size),
        float(stats.rings_gt6),
        float(heavy),
        aromatic / heavy if heavy else 0.0,
        hetero / heavy if heavy else 0.0,
        fp.on_count / fp.width,
    ]


def read_features_csv(path) -> tuple[list[str], np.ndarray]:
    """CSV feature file: header ``id,f1..fd``; returns ids and a matrix."""
    ids: list[str] = []
    rows: list[list[float]] = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if not header.lower().startswith("id"):
            raise ValueError(f"{path}: expected header starting with 'id'")
        for line_no, line in enumerate(fh, 2):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            ids.append(cells[0])
            try:
                rows.append([float(c) for c in cells[1:]])
            except ValueError:
                raise ValueError(f"{path}:{line_no}: non-numeric feature value")
    matrix = np.asarray(rows, dtype=float)
    if matrix.ndim != 2 or len({len(r) for r in rows}) > 1:
        raise DimensionMismatch(f"{path}: ragged feature rows")
    return ids, matrix


def write_features_binary(path, matrix: np.ndarray) -> None:
    matrix = np.ascontiguousarray(matrix, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(FEATURE_MAGIC)
        fh.write(struct.pack("<I", matrix.shape[1]))
        fh.write(struct.pack("<Q", matrix.shape[0]))
        fh.write(matrix.tobytes())


def read_features_binary(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(len(FEATURE_MAGIC))
        if magic != FEATURE_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        (dim,) = struct.unpack("<I", fh.read(4))
        (count,) = struct.unpack("<Q", fh.read(8))
        data = np.frombuffer(fh.read(count * dim * 8), dtype="<f8")
    if data.size != count * dim:
        raise ValueError(f"{path}: truncated feature payload")
    return data.reshape(count, dim)
