"""Ring perception: smallest set of smallest rings (SSSR).

Candidate cycles come from the Horton construction (shortest paths from
every vertex joined across every edge); a greedy GF(2) elimination over
bond-incidence vectors then selects one independent cycle per unit of
circuit rank, smallest first. Ties between equal-sized rings are broken
by the sorted atom-index tuple, which makes the returned set reproducible
for a fixed input graph.
"""

from __future__ import annotations

from collections import deque

from .mol import Molecule, RingInfo


def _shortest_path_tree(mol: Molecule, root: int) -> tuple[list[int], list[int]]:
    """BFS parents and depths; neighbor ties resolved by smallest index."""
    n = len(mol.atoms)
    parent = [-1] * n
    depth = [-1] * n
    depth[root] = 0
    queue = deque([root])
    while queue:
        cur = queue.popleft()
        for nbr, _ in sorted(mol.neighbors(cur)):
            if depth[nbr] == -1:
                depth[nbr] = depth[cur] + 1
                parent[nbr] = cur
                queue.append(nbr)
    return parent, depth


def _path_to_root(parent: list[int], node: int) -> list[int]:
    path = [node]
    while parent[node] != -1:
        node = parent[node]
        path.append(node)
    return path


def _candidate_cycles(mol: Molecule) -> list[tuple[int, ...]]:
    """Horton candidates as ordered atom cycles, deduplicated by atom set."""
    candidates: dict[frozenset[int], tuple[int, ...]] = {}
    for root in range(len(mol.atoms)):
        parent, depth = _shortest_path_tree(mol, root)
        for bond in mol.bonds:
            a, b = bond.a, bond.b
            if depth[a] == -1 or depth[b] == -1:
                continue
            pa = _path_to_root(parent, a)
            pb = _path_to_root(parent, b)
            # Paths must meet only at the root, otherwise the walk repeats atoms.
            if set(pa) & set(pb) != {root}:
                continue
            cycle = tuple(pa + pb[::-1][1:])  # a..root..b, closing edge a-b
            if len(cycle) < 3:
                continue
            key = frozenset(cycle)
            if len(key) != len(cycle):
                continue
            if key not in candidates or len(cycle) < len(candidates[key]):
                candidates[key] = cycle
    return sorted(candidates.values(), key=lambda c: (len(c), tuple(sorted(c))))


def _cycle_edge_vector(cycle: tuple[int, ...], bond_index: dict[frozenset[int], int]) -> int:
    vec = 0
    for i, a in enumerate(cycle):
        b = cycle[(i + 1) % len(cycle)]
        vec |= 1 << bond_index[frozenset((a, b))]
    return vec


def _normalize_cycle(cycle: tuple[int, ...]) -> tuple[int, ...]:
    """Rotate to start at the smallest atom, walking toward its smaller neighbor."""
    start = cycle.index(min(cycle))
    rotated = cycle[start:] + cycle[:start]
    if rotated[1] > rotated[-1]:
        rotated = (rotated[0],) + tuple(reversed(rotated[1:]))
    return rotated


def perceive_rings(mol: Molecule) -> RingInfo:
    """Compute the SSSR of ``mol``.

    The number of returned rings equals the circuit rank
    (bonds - atoms + components); acyclic inputs yield an empty set.
    """
    n_rings_needed = len(mol.bonds) - len(mol.atoms) + len(mol.components())
    if n_rings_needed <= 0:
        return RingInfo(
            rings=(),
            atom_ring_count=(0,) * len(mol.atoms),
            bond_ring_count=(0,) * len(mol.bonds),
        )
    bond_index = {frozenset((b.a, b.b)): i for i, b in enumerate(mol.bonds)}
    # GF(2) echelon form keyed by the leading bit of each basis vector.
    basis: dict[int, int] = {}
    chosen: list[tuple[int, ...]] = []
    for cycle in _candidate_cycles(mol):
        vec = _cycle_edge_vector(cycle, bond_index)
        while vec:
            lead = vec.bit_length() - 1
            if lead not in basis:
                break
            vec ^= basis[lead]
        if vec:
            basis[vec.bit_length() - 1] = vec
            chosen.append(_normalize_cycle(cycle))
            if len(chosen) == n_rings_needed:
                break
    chosen.sort(key=lambda c: (len(c), tuple(sorted(c))))
    atom_count = [0] * len(mol.atoms)
    bond_count = [0] * len(mol.bonds)
    for cycle in chosen:
        for i, a in enumerate(cycle):
            atom_count[a] += 1
            b = cycle[(i + 1) % len(cycle)]
            bond_count[bond_index[frozenset((a, b))]] += 1
    return RingInfo(
        rings=tuple(chosen),
        atom_ring_count=tuple(atom_count),
        bond_ring_count=tuple(bond_count),
    )


def with_ring_flags(mol: Molecule, info: RingInfo) -> Molecule:
    """Attach ring info and set ``in_ring`` on member bonds."""
    from dataclasses import replace

    new_bonds = tuple(
        replace(bond, in_ring=info.bond_ring_count[i] > 0) for i, bond in enumerate(mol.bonds)
    )
    return mol.with_changes(bonds=new_bonds, rings=info)
