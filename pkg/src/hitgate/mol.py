"""Attributed molecular graph: atoms, bonds, rings, valence accounting.

A ``Molecule`` is immutable after construction; the perception helpers
(rings, aromaticity, implicit hydrogens) return new ``Molecule`` values.
All downstream descriptor and filter code treats molecules as shareable
values, so nothing here mutates in place.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import IntEnum

from .elements import Element, allowed_valences, get_element


class BondOrder(IntEnum):
    SINGLE = 1
    DOUBLE = 2
    TRIPLE = 3
    AROMATIC = 4


class NoValenceFit(ValueError):
    """Bond-order sum exceeds every allowed valence of the atom."""

    def __init__(self, atom_index: int, detail: str):
        self.atom_index = atom_index
        super().__init__(f"atom {atom_index}: {detail}")


@dataclass(frozen=True, slots=True)
class Atom:
    """One atom of the graph.

    ``explicit_h`` comes from bracket notation and is authoritative there;
    ``implicit_h`` stays 0 until hydrogen perception runs. ``bracket``
    records whether the atom was written in brackets, which suppresses
    implicit-hydrogen filling. ``input_aromatic`` preserves the lowercase
    spelling seen by the parser and only feeds aromaticity perception.
    """

    element: Element
    formal_charge: int = 0
    explicit_h: int = 0
    implicit_h: int = 0
    aromatic: bool = False
    isotope: int | None = None
    bracket: bool = False
    input_aromatic: bool = False
    chiral: str | None = None  # "@" or "@@", annotation only

    @property
    def total_h(self) -> int:
        return self.explicit_h + self.implicit_h


@dataclass(frozen=True, slots=True)
class Bond:
    a: int
    b: int
    order: BondOrder
    in_ring: bool = False
    aromatic: bool = False
    direction: str | None = None  # "/" or "\\" as written from a to b

    def other(self, idx: int) -> int:
        if idx == self.a:
            return self.b
        if idx == self.b:
            return self.a
        raise ValueError(f"atom {idx} not on bond {self.a}-{self.b}")

    @property
    def effective_order(self) -> int:
        """Bond-order contribution to valence sums; un-kekulized aromatic
        bonds count one (validity flags them separately)."""
        return 1 if self.order == BondOrder.AROMATIC else int(self.order)


@dataclass(frozen=True, slots=True)
class RingInfo:
    """Smallest set of smallest rings plus membership counts."""

    rings: tuple[tuple[int, ...], ...]
    atom_ring_count: tuple[int, ...]
    bond_ring_count: tuple[int, ...]

    def ring_bond_sets(self) -> list[set[frozenset[int]]]:
        out = []
        for ring in self.rings:
            edges = set()
            for i, a in enumerate(ring):
                edges.add(frozenset((a, ring[(i + 1) % len(ring)])))
            out.append(edges)
        return out


@dataclass(frozen=True, slots=True)
class ValidityReport:
    valid: bool
    violations: tuple[tuple[int, str], ...] = ()


class Molecule:
    """Immutable simple graph of atoms and bonds.

    ``neighbor_order`` preserves, per atom, the neighbor encounter order of
    the original input (with -1 standing for an implicit bracket hydrogen);
    it exists solely so chiral tags can be re-oriented when writing.
    """

    __slots__ = ("atoms", "bonds", "rings", "source_text", "neighbor_order", "_adj")

    def __init__(
        self,
        atoms: tuple[Atom, ...],
        bonds: tuple[Bond, ...],
        rings: RingInfo | None = None,
        source_text: str | None = None,
        neighbor_order: tuple[tuple[int, ...], ...] | None = None,
    ):
        seen: set[frozenset[int]] = set()
        n = len(atoms)
        for bond in bonds:
            if bond.a == bond.b:
                raise ValueError(f"self-loop on atom {bond.a}")
            if not (0 <= bond.a < n and 0 <= bond.b < n):
                raise ValueError(f"bond {bond.a}-{bond.b} out of range")
            key = frozenset((bond.a, bond.b))
            if key in seen:
                raise ValueError(f"parallel bond {bond.a}-{bond.b}")
            seen.add(key)
        self.atoms = atoms
        self.bonds = bonds
        self.rings = rings
        self.source_text = source_text
        self.neighbor_order = neighbor_order
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for bi, bond in enumerate(bonds):
            adj[bond.a].append((bond.b, bi))
            adj[bond.b].append((bond.a, bi))
        self._adj = tuple(tuple(x) for x in adj)

    def __len__(self) -> int:
        return len(self.atoms)

    def neighbors(self, idx: int) -> tuple[tuple[int, int], ...]:
        """(neighbor atom index, bond index) pairs for ``idx``."""
        return self._adj[idx]

    def degree(self, idx: int) -> int:
        return len(self._adj[idx])

    def bond_between(self, i: int, j: int) -> Bond | None:
        for nbr, bi in self._adj[i]:
            if nbr == j:
                return self.bonds[bi]
        return None

    def bond_order_sum(self, idx: int) -> int:
        return sum(self.bonds[bi].effective_order for _, bi in self._adj[idx])

    def components(self) -> list[list[int]]:
        """Connected components as sorted atom-index lists."""
        seen = [False] * len(self.atoms)
        comps: list[list[int]] = []
        for start in range(len(self.atoms)):
            if seen[start]:
                continue
            stack, comp = [start], []
            seen[start] = True
            while stack:
                cur = stack.pop()
                comp.append(cur)
                for nbr, _ in self._adj[cur]:
                    if not seen[nbr]:
                        seen[nbr] = True
                        stack.append(nbr)
            comps.append(sorted(comp))
        return comps

    @property
    def multi_fragment(self) -> bool:
        return len(self.components()) > 1

    def with_changes(
        self,
        atoms: tuple[Atom, ...] | None = None,
        bonds: tuple[Bond, ...] | None = None,
        rings: RingInfo | None = None,
    ) -> "Molecule":
        return Molecule(
            atoms if atoms is not None else self.atoms,
            bonds if bonds is not None else self.bonds,
            rings if rings is not None else self.rings,
            self.source_text,
            self.neighbor_order,
        )

    def __repr__(self) -> str:
        return f"Molecule({len(self.atoms)} atoms, {len(self.bonds)} bonds)"


def assign_implicit_hydrogens(mol: Molecule, strict: bool = False) -> Molecule:
    """Fill implicit hydrogens on organic-subset atoms.

    Bracket atoms keep their explicit count and get no implicit hydrogens.
    For the rest, the implicit count tops the bond-order sum up to the
    smallest charge-adjusted valence that fits. When nothing fits the atom
    is left with zero implicit hydrogens (validity flags it later), or
    ``NoValenceFit`` is raised in strict mode.
    """
    new_atoms = []
    for idx, atom in enumerate(mol.atoms):
        if atom.bracket or not atom.element.default_valences:
            new_atoms.append(replace(atom, implicit_h=0))
            continue
        bond_sum = mol.bond_order_sum(idx)
        fits = [v for v in allowed_valences(atom.element, atom.formal_charge) if v >= bond_sum]
        if not fits:
            if strict:
                raise NoValenceFit(
                    idx, f"bond-order sum {bond_sum} exceeds valences of {atom.element.symbol}"
                )
            new_atoms.append(replace(atom, implicit_h=0))
            continue
        new_atoms.append(replace(atom, implicit_h=fits[0] - bond_sum))
    return mol.with_changes(atoms=tuple(new_atoms))


def check_validity(mol: Molecule) -> ValidityReport:
    """Valence and aromaticity consistency check.

    An atom passes when its total valence (bond orders + hydrogens) is one
    of the charge-adjusted allowed values. Aromatic atoms must sit in a
    perceived aromatic ring; leftover un-kekulized aromatic bonds are
    reported on both end atoms.
    """
    violations: list[tuple[int, str]] = []
    for idx, atom in enumerate(mol.atoms):
        if atom.element.symbol == "*":
            continue
        allowed = allowed_valences(atom.element, atom.formal_charge)
        bond_sum = mol.bond_order_sum(idx)
        total = bond_sum + atom.total_h
        if not allowed:
            if bond_sum or atom.total_h:
                violations.append(
                    (idx, f"{atom.element.symbol} has no valence model but carries bonds")
                )
            continue
        if total not in allowed:
            charge = f"{atom.formal_charge:+d}" if atom.formal_charge else ""
            violations.append(
                (
                    idx,
                    f"valence {total} not allowed for {atom.element.symbol}{charge}"
                    f" (allowed: {','.join(map(str, allowed))})",
                )
            )
    aromatic_ring_atoms: set[int] = set()
    if mol.rings is not None:
        for ring in mol.rings.rings:
            if all(mol.atoms[i].aromatic for i in ring):
                aromatic_ring_atoms.update(ring)
    for idx, atom in enumerate(mol.atoms):
        if (atom.aromatic or atom.input_aromatic) and idx not in aromatic_ring_atoms:
            violations.append((idx, "aromatic atom outside any aromatic ring"))
    for bond in mol.bonds:
        if bond.order == BondOrder.AROMATIC:
            violations.append((bond.a, f"un-kekulized aromatic bond {bond.a}-{bond.b}"))
    violations.sort()
    return ValidityReport(valid=not violations, violations=tuple(violations))


def heavy_atom_count(mol: Molecule) -> int:
    return sum(1 for a in mol.atoms if a.element.atomic_number > 1)


def molecular_formula(mol: Molecule) -> str:
    """Hill-order formula: C, H, then alphabetical; charge suffix if any."""
    counts: dict[str, int] = {}
    charge = 0
    for atom in mol.atoms:
        counts[atom.element.symbol] = counts.get(atom.element.symbol, 0) + 1
        counts["H"] = counts.get("H", 0) + atom.total_h
        charge += atom.formal_charge
    if counts.get("H") == 0:
        del counts["H"]
    symbols = sorted(counts)
    if "C" in counts:
        symbols = ["C"] + (["H"] if "H" in counts else []) + [
            s for s in symbols if s not in ("C", "H")
        ]
    parts = [f"{s}{counts[s] if counts[s] > 1 else ''}" for s in symbols]
    if charge:
        sign = "+" if charge > 0 else "-"
        parts.append(sign if abs(charge) == 1 else f"{sign}{abs(charge)}")
    return "".join(parts)


def molecular_weight(mol: Molecule) -> float:
    """Average-mass molecular weight including implicit/explicit hydrogens."""
    from .elements import HYDROGEN_MASS

    total = 0.0
    for atom in mol.atoms:
        total += atom.element.standard_mass
        total += atom.total_h * HYDROGEN_MASS
    return total


def build_molecule(
    atoms: list[Atom],
    bonds: list[Bond],
    source_text: str | None = None,
    neighbor_order: list[list[int]] | None = None,
) -> Molecule:
    return Molecule(
        tuple(atoms),
        tuple(bonds),
        rings=None,
        source_text=source_text,
        neighbor_order=tuple(tuple(x) for x in neighbor_order) if neighbor_order else None,
    )


def make_atom(symbol: str, **kwargs) -> Atom:
    """Convenience constructor used by tests and fragment builders."""
    return Atom(element=get_element(symbol), **kwargs)
