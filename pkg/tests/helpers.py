"""Independent oracles used across the test suite.

Everything here is deliberately written against the public Molecule API
only, with brute-force algorithms, so that it cannot share bugs with the
library's optimized implementations.
"""

from __future__ import annotations

import itertools
import random

from hitgate.mol import Atom, Bond, BondOrder, Molecule, RingInfo


def atom_fingerprint(atom: Atom) -> tuple:
    return (
        atom.element.atomic_number,
        atom.formal_charge,
        atom.total_h,
        atom.aromatic,
    )


def bond_label(bond: Bond) -> int:
    # Kekule rotation inside aromatic rings is not an isomorphism difference.
    return 4 if bond.aromatic else int(bond.order)


def are_isomorphic(m1: Molecule, m2: Molecule) -> bool:
    """Backtracking graph-isomorphism oracle over atom/bond labels."""
    if len(m1.atoms) != len(m2.atoms) or len(m1.bonds) != len(m2.bonds):
        return False
    if sorted(map(atom_fingerprint, m1.atoms)) != sorted(map(atom_fingerprint, m2.atoms)):
        return False
    n = len(m1.atoms)
    candidates = [
        [j for j in range(n) if atom_fingerprint(m2.atoms[j]) == atom_fingerprint(m1.atoms[i])]
        for i in range(n)
    ]
    order = sorted(range(n), key=lambda i: len(candidates[i]))
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def edges_consistent(i: int, j: int) -> bool:
        for nbr, bi in m1.neighbors(i):
            if nbr in mapping:
                other = m2.bond_between(j, mapping[nbr])
                if other is None or bond_label(other) != bond_label(m1.bonds[bi]):
                    return False
        for nbr2, bi2 in m2.neighbors(j):
            inv = {v: k for k, v in mapping.items()}
            if nbr2 in inv:
                mine = m1.bond_between(i, inv[nbr2])
                if mine is None or bond_label(mine) != bond_label(m2.bonds[bi2]):
                    return False
        return True

    def backtrack(k: int) -> bool:
        if k == n:
            return True
        i = order[k]
        for j in candidates[i]:
            if j in used:
                continue
            if edges_consistent(i, j):
                mapping[i] = j
                used.add(j)
                if backtrack(k + 1):
                    return True
                del mapping[i]
                used.discard(j)
        return False

    return backtrack(0)


def enumerate_simple_cycles(mol: Molecule, max_len: int = 12) -> set[frozenset[int]]:
    """All simple cycles (as atom sets) up to max_len, by exhaustive DFS."""
    cycles: set[frozenset[int]] = set()
    n = len(mol.atoms)

    def walk(start: int, current: int, path: list[int]) -> None:
        for nbr, _ in mol.neighbors(current):
            if nbr == start and len(path) >= 3:
                cycles.add(frozenset(path))
            elif nbr > start and nbr not in path and len(path) < max_len:
                path.append(nbr)
                walk(start, nbr, path)
                path.pop()

    for start in range(n):
        walk(start, start, [start])
    return cycles


def permute_molecule(mol: Molecule, perm: list[int]) -> Molecule:
    """Relabel atoms: old index i becomes perm[i]. Perception data is carried."""
    n = len(mol.atoms)
    new_atoms: list[Atom | None] = [None] * n
    for i, atom in enumerate(mol.atoms):
        new_atoms[perm[i]] = atom
    new_bonds = tuple(
        Bond(
            a=perm[b.a],
            b=perm[b.b],
            order=b.order,
            in_ring=b.in_ring,
            aromatic=b.aromatic,
            direction=b.direction,
        )
        for b in mol.bonds
    )
    rings = None
    if mol.rings is not None:
        mapped = tuple(tuple(perm[a] for a in ring) for ring in mol.rings.rings)
        atom_counts = [0] * n
        for i, c in enumerate(mol.rings.atom_ring_count):
            atom_counts[perm[i]] = c
        bond_key_to_count = {
            frozenset((perm[mol.bonds[bi].a], perm[mol.bonds[bi].b])): c
            for bi, c in enumerate(mol.rings.bond_ring_count)
        }
        bond_counts = tuple(
            bond_key_to_count[frozenset((b.a, b.b))] for b in new_bonds
        )
        rings = RingInfo(
            rings=mapped,
            atom_ring_count=tuple(atom_counts),
            bond_ring_count=bond_counts,
        )
    neighbor_order = None
    if mol.neighbor_order is not None:
        rebuilt: list[tuple[int, ...] | None] = [None] * n
        for i, seq in enumerate(mol.neighbor_order):
            rebuilt[perm[i]] = tuple(x if x < 0 else perm[x] for x in seq)
        neighbor_order = tuple(rebuilt)  # type: ignore[arg-type]
    permuted = Molecule(
        tuple(new_atoms),  # type: ignore[arg-type]
        new_bonds,
        rings=rings,
        source_text=mol.source_text,
        neighbor_order=neighbor_order,
    )
    return permuted


def random_permutation(n: int, rng: random.Random) -> list[int]:
    perm = list(range(n))
    rng.shuffle(perm)
    return perm


def brute_force_subgraph_matches(mol, pattern) -> set[frozenset[int]]:
    """All injective pattern->molecule mappings, deduplicated by atom set.

    Exhaustive enumeration over the product of per-node candidate lists
    (every atom satisfying the node predicate), with injectivity and all
    edge predicates checked on each complete assignment. Equivalent to
    enumerating every injective assignment, and independent of the
    matcher's anchored backtracking.
    """
    n_pat = len(pattern.nodes)
    candidates = [
        [a for a in range(len(mol.atoms)) if pattern.nodes[k].matches(mol, a)]
        for k in range(n_pat)
    ]
    found: set[frozenset[int]] = set()
    for assignment in itertools.product(*candidates):
        if len(set(assignment)) != n_pat:
            continue
        ok = True
        for i, j, pred in pattern.edges:
            bond = mol.bond_between(assignment[i], assignment[j])
            if bond is None or not pred.matches(bond):
                ok = False
                break
        if ok:
            found.add(frozenset(assignment))
    return found
