"""Physicochemical descriptors: molecular weight, additive logP, ring stats.

The logP model is additive over typed atoms (Wildman-Crippen style): each
heavy atom is assigned one type from element, aromaticity and neighbor
context, hydrogens are typed by their parent atom, and logP is the plain
sum of the table contributions. ``crippen_atom_types`` exposes the
assignment so the additivity identity can be checked directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .assets import read_table
from .mol import BondOrder, Molecule, molecular_weight  # noqa: F401  (re-export)


class UnclassifiableAtom(ValueError):
    def __init__(self, index: int, symbol: str):
        self.index = index
        super().__init__(f"no logP atom type for atom {index} ({symbol})")


@lru_cache(maxsize=1)
def crippen_table() -> dict[str, float]:
    return {row["type"]: float(row["contribution"]) for row in read_table("crippen_contribs.tsv")}


_HETERO = {"N", "O", "P", "S", "F", "Cl", "Br", "I", "Se", "As"}


def _carbon_type(mol: Molecule, idx: int) -> str:
    atom = mol.atoms[idx]
    neighbors = [(mol.atoms[j], mol.bonds[bi]) for j, bi in mol.neighbors(idx)]
    if atom.aromatic:
        if atom.total_h >= 1:
            return "C18"
        aromatic_bonds = sum(1 for _, b in neighbors if b.aromatic)
        if aromatic_bonds >= 3:
            return "C19"
        for other, bond in neighbors:
            if bond.aromatic:
                continue
            if bond.order in (BondOrder.DOUBLE, BondOrder.TRIPLE):
                return "C25"
            symbol = other.element.symbol
            if other.aromatic:
                return "C20"
            if symbol == "C":
                return "C21"
            if symbol == "N":
                return "C22"
            if symbol == "O":
                return "C23"
            if symbol == "S":
                return "C24"
            if symbol == "F":
                return "C14"
            if symbol == "Cl":
                return "C15"
            if symbol == "Br":
                return "C16"
            if symbol == "I":
                return "C17"
            return "C13"
        return "CS"
    doubles = sum(1 for _, b in neighbors if not b.aromatic and b.order == BondOrder.DOUBLE)
    triples = sum(1 for _, b in neighbors if b.order == BondOrder.TRIPLE)
    if triples or doubles >= 2:
        return "C7"
    if doubles == 1:
        partner = next(
            other for other, b in neighbors if not b.aromatic and b.order == BondOrder.DOUBLE
        )
        if partner.element.symbol != "C":
            return "C5"
        if any(other.aromatic for other, _ in neighbors) or partner.aromatic:
            return "C26"
        return "C6"
    # sp3 carbon
    symbols = [other.element.symbol for other, _ in neighbors]
    if any(s in _HETERO for s in symbols):
        return "C3" if atom.total_h >= 2 else "C4"
    if any(other.aromatic for other, _ in neighbors):
        if atom.total_h == 3:
            partner = next(other for other, _ in neighbors if other.aromatic)
            return "C8" if partner.element.symbol == "C" else "C9"
        if atom.total_h == 2:
            return "C10"
        if atom.total_h == 1:
            return "C11"
        return "C12"
    if all(s == "C" for s in symbols):
        return "C1" if atom.total_h >= 2 else "C2"
    return "C27"


def _nitrogen_type(mol: Molecule, idx: int) -> str:
    atom = mol.atoms[idx]
    if atom.aromatic:
        if atom.formal_charge == 0:
            return "N11"
        return "N12" if atom.formal_charge > 0 else "N14"
    if atom.formal_charge > 0:
        return "N10" if atom.total_h >= 1 else "N13"
    if atom.formal_charge < 0:
        return "N14"
    neighbors = [(mol.atoms[j], mol.bonds[bi]) for j, bi in mol.neighbors(idx)]
    if any(b.order == BondOrder.TRIPLE for _, b in neighbors):
        return "N9"
    if any(not b.aromatic and b.order == BondOrder.DOUBLE for _, b in neighbors):
        return "N5" if atom.total_h >= 1 else "N6"
    attached_aromatic = any(other.aromatic for other, _ in neighbors)
    if atom.total_h >= 2:
        return "N3" if attached_aromatic else "N1"
    if atom.total_h == 1:
        return "N4" if attached_aromatic else "N2"
    return "N8" if attached_aromatic else "N7"


def _oxygen_type(mol: Molecule, idx: int) -> str:
    atom = mol.atoms[idx]
    if atom.aromatic:
        return "O1"
    neighbor_info = [(j, mol.atoms[j], mol.bonds[bi]) for j, bi in mol.neighbors(idx)]
    if atom.formal_charge < 0:
        for j, other, _ in neighbor_info:
            if other.element.symbol == "N":
                return "O5"
            if other.element.symbol == "S":
                return "O6"
            if other.element.symbol == "C":
                carboxylate = any(
                    mol.bonds[bi2].order == BondOrder.DOUBLE
                    and mol.atoms[k].element.symbol == "O"
                    for k, bi2 in mol.neighbors(j)
                )
                if carboxylate:
                    return "O12"
        return "O7"
    if atom.total_h >= 1:
        return "O2"
    double_at = next(
        ((j, other) for j, other, b in neighbor_info
         if not b.aromatic and b.order == BondOrder.DOUBLE),
        None,
    )
    if double_at is not None:
        j, partner = double_at
        symbol = partner.element.symbol
        if symbol in ("N", "O"):
            return "O5"
        if symbol == "S":
            return "O6"
        if symbol == "C":
            if partner.aromatic:
                return "O8"
            carbon_neighbors = [mol.atoms[k] for k, _ in mol.neighbors(j) if k != idx]
            if any(n.element.symbol not in ("C", "H") for n in carbon_neighbors):
                return "O11"
            if any(n.aromatic for n in carbon_neighbors):
                return "O10"
            return "O9"
        return "OS"
    if len(neighbor_info) == 2:
        if any(other.aromatic for _, other, _ in neighbor_info):
            return "O4"
        return "O3"
    return "OS"


def crippen_atom_types(mol: Molecule) -> list[tuple[int, str, int]]:
    """(atom index, heavy-atom type, hydrogen count typed alongside).

    The hydrogen type for each atom's hydrogens is derived from the parent
    atom and returned via :func:`crippen_hydrogen_type`.
    """
    out = []
    for idx, atom in enumerate(mol.atoms):
        symbol = atom.element.symbol
        if symbol == "C":
            a_type = _carbon_type(mol, idx)
        elif symbol == "N":
            a_type = _nitrogen_type(mol, idx)
        elif symbol == "O":
            a_type = _oxygen_type(mol, idx)
        elif symbol == "S":
            a_type = "S3" if atom.aromatic else ("S2" if atom.formal_charge else "S1")
        elif symbol == "P":
            a_type = "P"
        elif symbol in ("F", "Cl", "Br", "I"):
            a_type = symbol
        elif symbol == "H":
            a_type = "H1"
        else:
            raise UnclassifiableAtom(idx, symbol)
        out.append((idx, a_type, atom.total_h))
    return out


def crippen_hydrogen_type(mol: Molecule, idx: int) -> str:
    """Type of the hydrogens sitting on atom ``idx``."""
    atom = mol.atoms[idx]
    symbol = atom.element.symbol
    if symbol in ("C", "H"):
        return "H1"
    if symbol == "N":
        return "H3"
    if symbol == "O":
        for j, bi in mol.neighbors(idx):
            other = mol.atoms[j]
            if other.element.symbol == "N":
                return "H3"
            if other.element.symbol in ("O", "S"):
                return "H4"
            if other.element.symbol == "C":
                acid_like = any(
                    mol.bonds[bi2].order == BondOrder.DOUBLE and not mol.bonds[bi2].aromatic
                    for _, bi2 in mol.neighbors(j)
                )
                if acid_like:
                    return "H4"
        return "H2"
    if symbol in ("S", "P"):
        return "H2"
    return "HS"


def crippen_logp(mol: Molecule) -> float:
    """Additive logP: sum of typed-atom and typed-hydrogen contributions."""
    table = crippen_table()
    total = 0.0
    for idx, a_type, h_count in crippen_atom_types(mol):
        total += table[a_type]
        if h_count:
            total += h_count * table[crippen_hydrogen_type(mol, idx)]
    return total


@dataclass(frozen=True)
class RingStats:
    ring_count: int
    max_ring_size: int
    rings_gt6: int
    has_fused: bool
    has_small_aromatic: bool


def ring_stats(mol: Molecule, strict_fusion: bool = False) -> RingStats:
    """SSSR-based ring statistics for the filter pipeline.

    ``has_fused`` flags ring pairs sharing more than one bond (bridged and
    ortho-peri pathology); with ``strict_fusion`` any shared bond counts,
    which also bans plain ortho-fused bicyclics like naphthalene.
    ``has_small_aromatic`` flags aromatic rings smaller than five atoms.
    """
    info = mol.rings
    if info is None or not info.rings:
        return RingStats(0, 0, 0, False, False)
    sizes = [len(r) for r in info.rings]
    ring_bond_sets = info.ring_bond_sets()
    has_fused = False
    threshold = 1 if strict_fusion else 2
    for i in range(len(ring_bond_sets)):
        for j in range(i + 1, len(ring_bond_sets)):
            if len(ring_bond_sets[i] & ring_bond_sets[j]) >= threshold:
                has_fused = True
                break
        if has_fused:
            break
    has_small_aromatic = any(
        len(ring) < 5 and all(mol.atoms[i].aromatic for i in ring) for ring in info.rings
    )
    return RingStats(
        ring_count=len(sizes),
        max_ring_size=max(sizes),
        rings_gt6=sum(1 for s in sizes if s > 6),
        has_fused=has_fused,
        has_small_aromatic=has_small_aromatic,
    )
