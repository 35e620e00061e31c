"""Synthetic-accessibility scoring (fragment frequency + complexity model).

score = fragment_score - complexity_penalties + symmetry_correction,
affinely rescaled to [1, 10] where 1 is easy to make.

* fragment_score: mean per-occurrence score of the molecule's circular
  environments (radius 2, unfolded identifiers) under a frequency-derived
  table; identifiers absent from the table score MISSING_SCORE.
* complexity penalties: size (n^1.005 - n), marked stereocenters
  (log10(n+1)), spiro atoms (log10(n+1)), bridgehead atoms (log10(n+1)),
  macrocycle presence (log10 2 for any ring larger than 8 atoms).
* symmetry correction: 0.5 * ln(n_atoms / n_distinct_environments) when
  positive, rewarding repetitive structures.

The raw value is mapped with RAW_MIN = -2.4, RAW_MAX = 1.6 (calibrated to
the raw-score span of the bundled reference corpus):
score10 = 11 - (raw - RAW_MIN) / (RAW_MAX - RAW_MIN) * 9, smoothed above 8
(8 + ln(score - 8 + 1)) and clamped to [1, 10].

The bundled table was produced by ``build_fragment_table`` over the
reference corpus in ``sa_reference_corpus.smi``; regenerate it for any
other corpus with the ``sa-table`` CLI command.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable

from .assets import data_path
from .fingerprints import morgan_environments
from .mol import Molecule, heavy_atom_count

RAW_MIN = -2.4
RAW_MAX = 1.6
MISSING_SCORE = -4.0
MACROCYCLE_THRESHOLD = 8
SCORE_CLIP = 4.0


class MissingFragmentTable(RuntimeError):
    pass


def load_fragment_table(path: str | Path | None = None) -> dict[int, float]:
    resolved = Path(path) if path else data_path("sa_fragment_scores.tsv")
    if not resolved.exists():
        raise MissingFragmentTable(f"fragment score table not found: {resolved}")
    table: dict[int, float] = {}
    with open(resolved, encoding="utf-8") as fh:
        header_seen = False
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if not header_seen:
                header_seen = True
                continue
            ident, score = line.split("\t")
            table[int(ident)] = float(score)
    if not table:
        raise MissingFragmentTable(f"fragment score table is empty: {resolved}")
    return table


@lru_cache(maxsize=1)
def _default_table() -> dict[int, float]:
    return load_fragment_table()


def _ring_complexity(mol: Molecule) -> tuple[int, int, int]:
    """(spiro atoms, bridgehead atoms, macrocycle count) from the SSSR."""
    info = mol.rings
    if info is None or len(info.rings) == 0:
        return 0, 0, 0
    n_macro = sum(1 for ring in info.rings if len(ring) > MACROCYCLE_THRESHOLD)
    spiro: set[int] = set()
    bridge: set[int] = set()
    ring_sets = [set(r) for r in info.rings]
    bond_sets = info.ring_bond_sets()
    for i in range(len(ring_sets)):
        for j in range(i + 1, len(ring_sets)):
            shared_atoms = ring_sets[i] & ring_sets[j]
            shared_bonds = bond_sets[i] & bond_sets[j]
            if len(shared_atoms) == 1:
                spiro.update(shared_atoms)
            elif len(shared_bonds) >= 2:
                # Ends of the shared path are the bridgeheads.
                incidence: dict[int, int] = {}
                for edge in shared_bonds:
                    for a in edge:
                        incidence[a] = incidence.get(a, 0) + 1
                bridge.update(a for a, c in incidence.items() if c == 1)
    return len(spiro), len(bridge), n_macro


@dataclass(frozen=True)
class SaBreakdown:
    fragment_score: float
    size_penalty: float
    stereo_penalty: float
    spiro_penalty: float
    bridge_penalty: float
    macrocycle_penalty: float
    symmetry_correction: float

    @property
    def raw(self) -> float:
        return (
            self.fragment_score
            - self.size_penalty
            - self.stereo_penalty
            - self.spiro_penalty
            - self.bridge_penalty
            - self.macrocycle_penalty
            + self.symmetry_correction
        )

    @property
    def score(self) -> float:
        span = RAW_MAX - RAW_MIN
        value = 11.0 - (self.raw - RAW_MIN) / span * 9.0
        if value > 8.0:
            value = 8.0 + math.log(value - 8.0 + 1.0)
        return min(10.0, max(1.0, value))


def sa_breakdown(mol: Molecule, fragment_table: dict[int, float] | None = None) -> SaBreakdown:
    table = fragment_table if fragment_table is not None else _default_table()
    if not table:
        raise MissingFragmentTable("empty fragment table")
    environments = morgan_environments(mol, radius=2, skip_molecule_spanning=True)
    occurrences = sum(environments.values())
    frag_total = sum(
        table.get(ident, MISSING_SCORE) * count for ident, count in environments.items()
    )
    fragment_score = frag_total / occurrences if occurrences else 0.0
    n_atoms = heavy_atom_count(mol)
    n_stereo = sum(1 for a in mol.atoms if a.chiral is not None)
    n_spiro, n_bridge, n_macro = _ring_complexity(mol)
    symmetry = 0.0
    if n_atoms > len(environments) and len(environments) > 0:
        symmetry = 0.5 * math.log(n_atoms / len(environments))
    return SaBreakdown(
        fragment_score=fragment_score,
        size_penalty=n_atoms**1.005 - n_atoms,
        stereo_penalty=math.log10(n_stereo + 1),
        spiro_penalty=math.log10(n_spiro + 1),
        bridge_penalty=math.log10(n_bridge + 1),
        macrocycle_penalty=math.log10(2) if n_macro else 0.0,
        symmetry_correction=symmetry,
    )


def sa_score(mol: Molecule, fragment_table: dict[int, float] | None = None) -> float:
    """Synthetic-accessibility score in [1, 10]; 1 = easy."""
    return sa_breakdown(mol, fragment_table).score


def build_fragment_table(molecules: Iterable[Molecule], radius: int = 2) -> dict[int, float]:
    """Derive a fragment score table from a reference corpus.

    Each environment identifier scores log10(count / mean_count), clipped
    to [-SCORE_CLIP, SCORE_CLIP]: environments more common than average in
    the corpus score positive (easy), rare ones negative.
    """
    counts: dict[int, int] = {}
    for mol in molecules:
        environments = morgan_environments(mol, radius, skip_molecule_spanning=True)
        for ident, count in environments.items():
            counts[ident] = counts.get(ident, 0) + count
    if not counts:
        raise MissingFragmentTable("no environments in reference corpus")
    mean = sum(counts.values()) / len(counts)
    return {
        ident: max(-SCORE_CLIP, min(SCORE_CLIP, math.log10(count / mean)))
        for ident, count in sorted(counts.items())
    }


def write_fragment_table(table: dict[int, float], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# Fragment score table: environment identifier -> score.\n")
        fh.write("# Generated by hitgate sa-table; see sascore.py for the formula.\n")
        fh.write("environment\tscore\n")
        for ident, score in sorted(table.items()):
            fh.write(f"{ident}\t{score:.4f}\n")
