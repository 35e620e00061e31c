"""Morgan (ECFP-style) circular fingerprints and Tanimoto similarity.

Environment identifiers are 64-bit FNV-1a hashes over a canonical byte
encoding (little-endian 8-byte integers), so fingerprints are bit-exact
across platforms and runs. The initial atom invariant hashes
(atomic number, charge, heavy degree, total hydrogens, ring flag,
aromatic flag); each iteration hashes the previous identifier together
with the sorted (bond key, neighbor identifier) list. Aromatic bonds use
a bond key of 4 regardless of their kekulized order, so every spelling of
an aromatic system fingerprints identically.
"""

from __future__ import annotations

from dataclasses import dataclass

from .mol import Molecule

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a(values: tuple[int, ...]) -> int:
    """64-bit FNV-1a over the little-endian 8-byte encoding of each value."""
    acc = _FNV_OFFSET
    for value in values:
        for byte in (value & _MASK64).to_bytes(8, "little"):
            acc ^= byte
            acc = (acc * _FNV_PRIME) & _MASK64
    return acc


class WidthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Fingerprint:
    bits: int
    width: int
    radius: int

    def __post_init__(self):
        if self.width <= 0 or self.width & (self.width - 1):
            raise ValueError("width must be a power of two")

    @property
    def on_count(self) -> int:
        return self.bits.bit_count()

    def on_bits(self) -> list[int]:
        return [i for i in range(self.width) if self.bits >> i & 1]


def _bond_key(bond) -> int:
    return 4 if bond.aromatic else int(bond.order)


def _initial_invariants(mol: Molecule) -> list[int]:
    ring_counts = mol.rings.atom_ring_count if mol.rings else (0,) * len(mol)
    return [
        fnv1a(
            (
                atom.element.atomic_number,
                atom.formal_charge + 8,  # keep the encoding non-negative
                mol.degree(i),
                atom.total_h,
                1 if ring_counts[i] > 0 else 0,
                1 if atom.aromatic else 0,
            )
        )
        for i, atom in enumerate(mol.atoms)
    ]


def morgan_environments(
    mol: Molecule, radius: int = 2, skip_molecule_spanning: bool = False
) -> dict[int, int]:
    """Unfolded environment-identifier counts over radii 0..radius.

    With ``skip_molecule_spanning``, environments of radius >= 1 whose
    atom ball already covers the whole molecule are dropped: they are
    boundary-truncated duplicates whose corpus frequency carries no
    signal (used by the synthetic-accessibility model).
    """
    identifiers = _initial_invariants(mol)
    counts: dict[int, int] = {}
    for ident in identifiers:
        counts[ident] = counts.get(ident, 0) + 1
    coverage = [{i} | {j for j, _ in mol.neighbors(i)} for i in range(len(mol.atoms))]
    n = len(mol.atoms)
    for r in range(1, radius + 1):
        updated = []
        for i in range(len(mol.atoms)):
            neighborhood = sorted(
                (_bond_key(mol.bonds[bi]), identifiers[j]) for j, bi in mol.neighbors(i)
            )
            flat: list[int] = [r, identifiers[i]]
            for key, ident in neighborhood:
                flat.extend((key, ident))
            updated.append(fnv1a(tuple(flat)))
        for i, ident in enumerate(updated):
            if skip_molecule_spanning and len(coverage[i]) == n:
                continue
            counts[ident] = counts.get(ident, 0) + 1
        identifiers = updated
        if r < radius:
            coverage = [
                set().union(*(coverage[j] for j, _ in mol.neighbors(i)), coverage[i])
                for i in range(n)
            ]
    return counts


def morgan_fingerprint(mol: Molecule, radius: int = 2, width: int = 2048) -> Fingerprint:
    """Fold every environment identifier from every radius into ``width`` bits."""
    bits = 0
    for ident in morgan_environments(mol, radius):
        bits |= 1 << (ident % width)
    return Fingerprint(bits=bits, width=width, radius=radius)


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    """Bit Jaccard similarity.

    Two all-zero fingerprints compare as 1.0 (identical objects should not
    read as dissimilar); other toolkits return 0 for this corner.
    """
    if a.width != b.width:
        raise WidthMismatch(f"width {a.width} vs {b.width}")
    union = (a.bits | b.bits).bit_count()
    if union == 0:
        return 1.0
    return (a.bits & b.bits).bit_count() / union


def tanimoto_distance(a: Fingerprint, b: Fingerprint) -> float:
    return 1.0 - tanimoto(a, b)
