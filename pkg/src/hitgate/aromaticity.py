"""Aromaticity perception and kekulization.

Each SSSR ring is tested independently: every member atom must be
sp2-capable and classifiable under the pi-electron contribution table
(``pi_electrons.tsv``), and the ring total must satisfy Hueckel's 4n+2.
Rings that fail, including envelope-only aromatics like azulene, resolve
to non-aromatic; lowercase input atoms left outside any aromatic ring are
reported as orphans by validity checking.

Aromatic-order input bonds inside perceived aromatic rings are kekulized
(alternating single/double via matching) so that valence accounting and
implicit-hydrogen perception see integer bond orders.
"""

from __future__ import annotations

from dataclasses import replace

from .elements import pi_electron_table
from .mol import Atom, Bond, BondOrder, Molecule

_SP2_ELEMENTS = {"B", "C", "N", "O", "P", "S", "Se", "As"}


def _classify(mol: Molecule, idx: int) -> str | None:
    """Pi-contribution category for a ring atom, or None if ineligible."""
    atom = mol.atoms[idx]
    symbol = atom.element.symbol
    if symbol not in _SP2_ELEMENTS:
        return None
    ring_double = 0
    exo_multiple = 0
    aromatic_ring_bond = False
    for _, bi in mol.neighbors(idx):
        bond = mol.bonds[bi]
        if bond.order == BondOrder.TRIPLE:
            return None
        if bond.order == BondOrder.DOUBLE:
            if bond.in_ring:
                ring_double += 1
            else:
                exo_multiple += 1
        if bond.order == BondOrder.AROMATIC and bond.in_ring:
            aromatic_ring_bond = True
    connections = mol.degree(idx) + atom.total_h
    if connections > 3 or ring_double + exo_multiple > 1:
        return None
    if exo_multiple:
        return "exocyclic_multiple_bond"
    if ring_double:
        return "ring_multiple_bond"
    if atom.input_aromatic and aromatic_ring_bond:
        # Lowercase input: no explicit double bond yet, classify by element.
        if symbol == "C":
            if atom.formal_charge == -1:
                return "carbanion"
            if atom.formal_charge == 1:
                return "carbocation"
            return "ring_multiple_bond"
        if symbol in ("N", "P", "As"):
            if (connections == 3 and atom.formal_charge == 0) or (
                connections == 2 and atom.formal_charge == -1
            ):
                return "lone_pair_n"
            return "ring_multiple_bond"
        if symbol == "O":
            return "ring_multiple_bond" if atom.formal_charge == 1 else "lone_pair_o"
        if symbol in ("S", "Se"):
            return "ring_multiple_bond" if atom.formal_charge == 1 else "lone_pair_s"
        if symbol == "B":
            return "exocyclic_multiple_bond" if connections == 3 else "ring_multiple_bond"
        return None
    # Saturated ring position (Kekule input): lone-pair donors only.
    if symbol in ("N", "P", "As"):
        return "lone_pair_n" if atom.formal_charge <= 0 else None
    if symbol == "O":
        return "lone_pair_o" if atom.formal_charge <= 0 else None
    if symbol in ("S", "Se"):
        return "lone_pair_s" if atom.formal_charge <= 0 else None
    if symbol == "C":
        if atom.formal_charge == -1:
            return "carbanion"
        if atom.formal_charge == 1:
            return "carbocation"
    return None


def _needs_kekule_double(mol: Molecule, idx: int, category: str) -> bool:
    """True when the atom's single pi electron is not yet backed by an
    explicit double bond and must receive one during kekulization."""
    if category != "ring_multiple_bond":
        return False
    return not any(
        mol.bonds[bi].order == BondOrder.DOUBLE for _, bi in mol.neighbors(idx)
    )


def _match_doubles(
    atoms: list[int], adjacency: dict[int, list[tuple[int, int]]]
) -> set[int] | None:
    """Perfect matching over ``atoms``; returns matched bond indices."""
    matched: dict[int, int] = {}
    chosen: set[int] = set()
    order = sorted(atoms, key=lambda a: len(adjacency.get(a, [])))

    def backtrack(pos: int) -> bool:
        while pos < len(order) and order[pos] in matched:
            pos += 1
        if pos == len(order):
            return True
        atom = order[pos]
        for nbr, bi in adjacency.get(atom, []):
            if nbr in matched:
                continue
            matched[atom] = nbr
            matched[nbr] = atom
            chosen.add(bi)
            if backtrack(pos + 1):
                return True
            del matched[atom]
            del matched[nbr]
            chosen.discard(bi)
        return False

    if backtrack(0):
        return chosen
    return None


def perceive_aromaticity(mol: Molecule) -> Molecule:
    """Mark aromatic atoms/bonds and kekulize aromatic-order input bonds.

    Requires ring perception (``mol.rings`` set, ``in_ring`` flagged).
    """
    if mol.rings is None:
        raise ValueError("perceive_aromaticity requires ring perception first")
    contributions = pi_electron_table()
    categories: dict[int, str | None] = {}
    aromatic_atoms: set[int] = set()
    aromatic_bonds: set[int] = set()
    bond_lookup = {frozenset((b.a, b.b)): i for i, b in enumerate(mol.bonds)}

    for ring in mol.rings.rings:
        total = 0
        eligible = True
        for idx in ring:
            if idx not in categories:
                categories[idx] = _classify(mol, idx)
            category = categories[idx]
            if category is None:
                eligible = False
                break
            total += contributions[category]
        if eligible and total % 4 == 2:
            aromatic_atoms.update(ring)
            for i, a in enumerate(ring):
                b = ring[(i + 1) % len(ring)]
                aromatic_bonds.add(bond_lookup[frozenset((a, b))])

    # Kekulize: lowercase-input atoms holding one pi electron need exactly
    # one double bond; match them pairwise along aromatic-order ring bonds.
    needs = [
        idx
        for idx in sorted(aromatic_atoms)
        if _needs_kekule_double(mol, idx, categories.get(idx) or "")
    ]
    adjacency: dict[int, list[tuple[int, int]]] = {}
    needs_set = set(needs)
    for bi in sorted(aromatic_bonds):
        bond = mol.bonds[bi]
        if bond.order != BondOrder.AROMATIC:
            continue
        if bond.a in needs_set and bond.b in needs_set:
            adjacency.setdefault(bond.a, []).append((bond.b, bi))
            adjacency.setdefault(bond.b, []).append((bond.a, bi))
    double_bonds = _match_doubles(needs, adjacency)
    if double_bonds is None:
        # Ambiguous pi assignment: resolve the affected system to
        # non-aromatic; validity will flag the leftover aromatic orders.
        aromatic_atoms.clear()
        aromatic_bonds.clear()
        double_bonds = set()

    new_atoms = tuple(
        replace(atom, aromatic=(i in aromatic_atoms)) for i, atom in enumerate(mol.atoms)
    )
    new_bonds: list[Bond] = []
    for bi, bond in enumerate(mol.bonds):
        order = bond.order
        if bond.order == BondOrder.AROMATIC:
            if bi in double_bonds:
                order = BondOrder.DOUBLE
            elif bi in aromatic_bonds:
                order = BondOrder.SINGLE
            elif bond.a in aromatic_atoms and bond.b in aromatic_atoms:
                order = BondOrder.SINGLE  # junction between two aromatic systems
        new_bonds.append(replace(bond, order=order, aromatic=bi in aromatic_bonds))
    return mol.with_changes(atoms=new_atoms, bonds=tuple(new_bonds))
