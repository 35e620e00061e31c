"""Scaffold decomposition and retrosynthetic fragmentation.

The scaffold operation keeps ring systems and the linkers between them:
terminal single-bonded atoms are pruned iteratively, while terminal atoms
held by a double bond (exocyclic carbonyl oxygens and the like) survive
with the retained frame. Acyclic molecules collapse to the reserved empty
scaffold key ``""``.

Fragmentation cuts every acyclic, non-aromatic single bond whose two end
atoms satisfy a sanctioned pair of cleavage environments (the bundled
16-label rule table); each cut end is capped with a ``*`` atom whose
isotope records the environment number.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

from .aromaticity import perceive_aromaticity
from .assets import read_table
from .canon import write_smiles
from .elements import get_element
from .mol import Atom, Bond, BondOrder, Molecule, assign_implicit_hydrogens
from .patterns import Pattern, find_matches, parse_pattern
from .rings import perceive_rings, with_ring_flags


def extract_subgraph(mol: Molecule, keep: set[int], extra_atoms: list[Atom] = (),
                     extra_bonds: list[tuple[int, int, BondOrder]] = ()) -> Molecule:
    """Induced subgraph over ``keep``, re-perceived from scratch.

    ``extra_atoms`` are appended after the kept atoms; ``extra_bonds``
    connect by new indices (kept atoms are renumbered by sorted old index,
    extras follow). Chiral annotations are dropped: neighbor order is not
    preserved by extraction.
    """
    ordered = sorted(keep)
    remap = {old: new for new, old in enumerate(ordered)}
    atoms = [
        replace(mol.atoms[i], implicit_h=0, aromatic=False, chiral=None) for i in ordered
    ]
    atoms.extend(extra_atoms)
    bonds = []
    for bond in mol.bonds:
        if bond.a in keep and bond.b in keep:
            bonds.append(
                Bond(a=remap[bond.a], b=remap[bond.b], order=bond.order, direction=None)
            )
    for a, b, order in extra_bonds:
        bonds.append(Bond(a=a, b=b, order=order))
    rebuilt = Molecule(tuple(atoms), tuple(bonds))
    rebuilt = with_ring_flags(rebuilt, perceive_rings(rebuilt))
    rebuilt = perceive_aromaticity(rebuilt)
    return assign_implicit_hydrogens(rebuilt)


@dataclass(frozen=True)
class Scaffold:
    molecule: Molecule | None
    canonical_key: str


def bemis_murcko_scaffold(mol: Molecule) -> Scaffold:
    """Rings plus linkers; empty scaffold (key ``""``) for acyclic input."""
    if mol.rings is None:
        raise ValueError("scaffold extraction requires ring perception")
    keep = set(range(len(mol.atoms)))
    ring_atoms = {i for ring in mol.rings.rings for i in ring}
    while True:
        removable = []
        for idx in keep:
            if idx in ring_atoms:
                continue
            live = [
                (j, bi) for j, bi in mol.neighbors(idx) if j in keep
            ]
            if len(live) > 1:
                continue
            if live and mol.bonds[live[0][1]].order != BondOrder.SINGLE:
                continue
            removable.append(idx)
        if not removable:
            break
        keep.difference_update(removable)
    if not keep & ring_atoms:
        return Scaffold(molecule=None, canonical_key="")
    scaffold_mol = extract_subgraph(mol, keep)
    return Scaffold(molecule=scaffold_mol, canonical_key=write_smiles(scaffold_mol))


# -- fragmentation --------------------------------------------------------

_GUARDS = {
    "none",
    "no_multiple_bond",
    "double_to_carbon",
    "neighbors_only_c_s",
    "neighbors_only_c",
    "not_ring_amide_n",
    "ring_amide_n",
    "ring_neighbor_hetero",
    "ring_neighbors_carbon",
    "aromatic_neighbor_hetero",
    "aromatic_neighbors_carbon",
}


def _guard_holds(mol: Molecule, idx: int, guard: str) -> bool:
    atom = mol.atoms[idx]
    bonds = [(j, mol.bonds[bi]) for j, bi in mol.neighbors(idx)]
    if guard == "none":
        return True
    if guard == "no_multiple_bond":
        return all(
            b.aromatic or b.order == BondOrder.SINGLE for _, b in bonds
        )
    if guard == "double_to_carbon":
        return any(
            not b.aromatic
            and b.order == BondOrder.DOUBLE
            and mol.atoms[j].element.symbol == "C"
            for j, b in bonds
        )
    if guard == "neighbors_only_c_s":
        return all(mol.atoms[j].element.symbol in ("C", "S") for j, _ in bonds)
    if guard == "neighbors_only_c":
        return all(mol.atoms[j].element.symbol == "C" for j, _ in bonds)
    if guard in ("ring_amide_n", "not_ring_amide_n"):
        is_amide = False
        for j, b in bonds:
            if not b.in_ring or mol.atoms[j].element.symbol != "C":
                continue
            carbonyl = any(
                mol.bonds[bi2].order == BondOrder.DOUBLE
                and not mol.bonds[bi2].aromatic
                and mol.atoms[k].element.symbol == "O"
                for k, bi2 in mol.neighbors(j)
            )
            if carbonyl:
                is_amide = True
                break
        return is_amide if guard == "ring_amide_n" else not is_amide
    if guard == "ring_neighbor_hetero":
        return any(
            b.in_ring and mol.atoms[j].element.symbol in ("N", "O", "S") for j, b in bonds
        )
    if guard == "ring_neighbors_carbon":
        count = sum(
            1
            for j, b in bonds
            if b.in_ring and mol.atoms[j].element.symbol == "C" and not mol.atoms[j].aromatic
        )
        return count >= 2
    if guard == "aromatic_neighbor_hetero":
        return any(
            b.aromatic and mol.atoms[j].element.symbol in ("N", "O", "S") for j, b in bonds
        )
    if guard == "aromatic_neighbors_carbon":
        count = sum(
            1
            for j, b in bonds
            if b.aromatic and mol.atoms[j].element.symbol == "C"
        )
        return count >= 2
    raise ValueError(f"unknown guard {guard!r}")


@dataclass(frozen=True)
class CleavageEnvironment:
    label: str
    number: int
    pattern: Pattern
    guard: str


@lru_cache(maxsize=1)
def cleavage_environments() -> dict[str, CleavageEnvironment]:
    envs = {}
    for row in read_table("brics_environments.tsv"):
        guard = row["guard"]
        if guard not in _GUARDS:
            raise ValueError(f"unknown guard {guard!r} in brics_environments.tsv")
        envs[row["label"]] = CleavageEnvironment(
            label=row["label"],
            number=int(row["label"][1:]),
            pattern=parse_pattern(row["pattern"], name=row["label"]),
            guard=guard,
        )
    return envs


@lru_cache(maxsize=1)
def cleavage_pairs() -> frozenset[tuple[str, str]]:
    pairs = set()
    for row in read_table("brics_pairs.tsv"):
        pairs.add((row["a"], row["b"]))
        pairs.add((row["b"], row["a"]))
    return frozenset(pairs)


def _environment_labels(mol: Molecule, idx: int) -> list[str]:
    labels = []
    for env in cleavage_environments().values():
        anchored = any(m[0] == idx for m in find_matches(mol, env.pattern))
        if not anchored:
            continue
        if not _guard_holds(mol, idx, env.guard):
            continue
        if env.label == "L5" and not _guard_holds(mol, idx, "not_ring_amide_n"):
            continue
        labels.append(env.label)
    return labels


@dataclass(frozen=True)
class FragmentSet:
    """Multiset of canonical fragment keys (attachment points as [n*])."""

    counts: tuple[tuple[str, int], ...]

    def as_dict(self) -> dict[str, int]:
        return dict(self.counts)

    def total(self) -> int:
        return sum(c for _, c in self.counts)


def fragment_molecule(mol: Molecule) -> FragmentSet:
    """Cut all sanctioned acyclic single bonds; cap ends with labeled ``*``."""
    pairs = cleavage_pairs()
    label_cache: dict[int, list[str]] = {}

    def labels(idx: int) -> list[str]:
        if idx not in label_cache:
            label_cache[idx] = _environment_labels(mol, idx)
        return label_cache[idx]

    cuts: list[tuple[int, tuple[str, str]]] = []  # (bond index, (label_a, label_b))
    for bi, bond in enumerate(mol.bonds):
        if bond.in_ring or bond.aromatic or bond.order != BondOrder.SINGLE:
            continue
        options = sorted(
            (la, lb)
            for la in labels(bond.a)
            for lb in labels(bond.b)
            if (la, lb) in pairs
        )
        if options:
            chosen = min(options, key=lambda p: (int(p[0][1:]), int(p[1][1:])))
            cuts.append((bi, chosen))
    if not cuts:
        return FragmentSet(counts=((write_smiles(mol), 1),))

    cut_bonds = {bi for bi, _ in cuts}
    caps: dict[int, list[int]] = {}  # atom -> cap environment numbers
    for bi, (la, lb) in cuts:
        bond = mol.bonds[bi]
        caps.setdefault(bond.a, []).append(int(la[1:]))
        caps.setdefault(bond.b, []).append(int(lb[1:]))

    # Connected components of the graph without the cut bonds.
    n = len(mol.atoms)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for bi, bond in enumerate(mol.bonds):
        if bi in cut_bonds:
            continue
        ra, rb = find(bond.a), find(bond.b)
        if ra != rb:
            parent[ra] = rb
    groups: dict[int, set[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), set()).add(i)

    keys: dict[str, int] = {}
    star = get_element("*")
    for members in groups.values():
        ordered = sorted(members)
        remap = {old: new for new, old in enumerate(ordered)}
        extra_atoms: list[Atom] = []
        extra_bonds: list[tuple[int, int, BondOrder]] = []
        next_idx = len(ordered)
        for old in ordered:
            for env_number in sorted(caps.get(old, [])):
                extra_atoms.append(Atom(element=star, isotope=env_number, bracket=True))
                extra_bonds.append((remap[old], next_idx, BondOrder.SINGLE))
                next_idx += 1
        fragment = extract_subgraph(mol, members, extra_atoms, extra_bonds)
        key = write_smiles(fragment)
        keys[key] = keys.get(key, 0) + 1
    return FragmentSet(counts=tuple(sorted(keys.items())))
