"""Canonical SMILES generation.

Canonical ranks come from iterative neighborhood refinement over the atom
invariants (element, charge, degree, hydrogen count, aromaticity, ring
membership). Ties that survive refinement are broken by branching: every
atom of the first tied class is promoted in turn (rank doubling), each
branch is refined to completion, and the lexicographically smallest output
string wins. Because the branch set depends only on the refined partition,
the winning text is invariant under relabeling of the input atoms.

Isotopes and stereo descriptors never participate in ranking. Chiral tags
are re-oriented to the output neighbor order (parity flip) and emitted;
directional slashes are dropped from canonical text. Two molecules whose
graphs differ only in cis/trans assignment therefore share one canonical
key, which is the documented uniqueness coarsening.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .mol import BondOrder, Molecule, check_validity


class InvalidMolecule(ValueError):
    """Canonicalization requested for a molecule that fails validity."""


@dataclass(frozen=True)
class CanonicalForm:
    text: str
    rank: tuple[int, ...]


def _bond_key(bond) -> int:
    return 4 if bond.aromatic else int(bond.order)


def _initial_ranks(mol: Molecule) -> list[int]:
    ring_counts = mol.rings.atom_ring_count if mol.rings else (0,) * len(mol)
    invariants = [
        (
            atom.element.atomic_number,
            atom.formal_charge,
            mol.degree(i),
            atom.total_h,
            atom.aromatic,
            ring_counts[i] > 0,
        )
        for i, atom in enumerate(mol.atoms)
    ]
    return _dense([(inv,) for inv in invariants])


def _dense(signatures: list[tuple]) -> list[int]:
    order = sorted(set(signatures))
    mapping = {sig: r for r, sig in enumerate(order)}
    return [mapping[sig] for sig in signatures]


def _refine(mol: Molecule, ranks: list[int]) -> list[int]:
    while True:
        signatures = []
        for i in range(len(ranks)):
            neighborhood = sorted(
                (_bond_key(mol.bonds[bi]), ranks[j]) for j, bi in mol.neighbors(i)
            )
            signatures.append((ranks[i], tuple(neighborhood)))
        new_ranks = _dense(signatures)
        if new_ranks == ranks:
            return ranks
        ranks = new_ranks


def canonical_ranks(mol: Molecule) -> tuple[str, tuple[int, ...]]:
    """Winning canonical text and per-atom ranks (rank 0 = root priority)."""
    best: tuple[str, tuple[int, ...]] | None = None

    def descend(ranks: list[int]) -> None:
        nonlocal best
        counts: dict[int, int] = {}
        for r in ranks:
            counts[r] = counts.get(r, 0) + 1
        tied = sorted(r for r, c in counts.items() if c > 1)
        if not tied:
            text = _write(mol, ranks)
            if best is None or text < best[0]:
                best = (text, tuple(ranks))
            return
        target = tied[0]
        for idx in [i for i, r in enumerate(ranks) if r == target]:
            bumped = [r * 2 for r in ranks]
            bumped[idx] -= 1
            descend(_refine(mol, bumped))

    descend(_refine(mol, _initial_ranks(mol)))
    assert best is not None
    return best


def canonicalize(mol: Molecule) -> CanonicalForm:
    """Canonical form of a valid molecule; raises InvalidMolecule otherwise."""
    report = check_validity(mol)
    if not report.valid:
        raise InvalidMolecule(f"{len(report.violations)} validity violations")
    text, ranks = canonical_ranks(mol)
    return CanonicalForm(text=text, rank=ranks)


def write_smiles(mol: Molecule) -> str:
    return canonicalize(mol).text


def canonical_key(text_or_mol) -> str:
    """Canonical SMILES for a molecule or raw SMILES string."""
    if isinstance(text_or_mol, Molecule):
        return write_smiles(text_or_mol)
    from .smiles import parse_smiles

    return write_smiles(parse_smiles(text_or_mol))


# -- emission ------------------------------------------------------------


def _write(mol: Molecule, ranks: list[int]) -> str:
    parts = []
    for comp in mol.components():
        root = min(comp, key=lambda i: ranks[i])
        parts.append(_write_component(mol, ranks, root))
    return ".".join(sorted(parts))


def _write_component(mol: Molecule, ranks: list[int], root: int) -> str:
    position: dict[int, int] = {}
    children: dict[int, list[int]] = {}
    closures_at: dict[int, list[tuple[int, int]]] = {}  # atom -> [(partner, bond idx)]
    tree_bond: dict[int, int] = {}
    seen_edges: set[int] = set()

    def explore(atom: int) -> None:
        position[atom] = len(position)
        children[atom] = []
        for nbr, bi in sorted(mol.neighbors(atom), key=lambda nb: ranks[nb[0]]):
            if bi in seen_edges:
                continue
            seen_edges.add(bi)
            if nbr in position:
                closures_at.setdefault(atom, []).append((nbr, bi))
                closures_at.setdefault(nbr, []).append((atom, bi))
            else:
                tree_bond[nbr] = bi
                children[atom].append(nbr)
                explore(nbr)

    explore(root)

    digit_pool: list[int] = list(range(1, 100))
    heapq.heapify(digit_pool)
    edge_digit: dict[int, int] = {}
    out: list[str] = []

    def bond_symbol(bi: int) -> str:
        bond = mol.bonds[bi]
        if bond.aromatic:
            return ""
        if bond.order == BondOrder.SINGLE:
            if mol.atoms[bond.a].aromatic and mol.atoms[bond.b].aromatic:
                return "-"
            return ""
        if bond.order == BondOrder.DOUBLE:
            return "="
        if bond.order == BondOrder.TRIPLE:
            return "#"
        return ":"

    def emit(atom: int, parent: int | None) -> None:
        ring_partners: list[int] = []
        closure_text = []
        for partner, bi in sorted(
            closures_at.get(atom, []), key=lambda pb: position[pb[0]]
        ):
            if position[partner] > position[atom]:  # opening side
                digit = heapq.heappop(digit_pool)
                edge_digit[bi] = digit
                closure_text.append(_digit(digit))
            else:  # closing side carries the bond symbol
                digit = edge_digit.pop(bi)
                closure_text.append(bond_symbol(bi) + _digit(digit))
                heapq.heappush(digit_pool, digit)
            ring_partners.append(partner)
        kids = children.get(atom, [])
        out.append(_atom_token(mol, atom, parent, ring_partners, kids))
        out.extend(closure_text)
        for kid in kids[:-1]:
            out.append("(" + bond_symbol(tree_bond[kid]))
            emit(kid, atom)
            out.append(")")
        if kids:
            last = kids[-1]
            out.append(bond_symbol(tree_bond[last]))
            emit(last, atom)

    emit(root, None)
    return "".join(out)


def _digit(d: int) -> str:
    return str(d) if d < 10 else f"%{d:02d}"


def _atom_token(
    mol: Molecule,
    idx: int,
    parent: int | None,
    ring_partners: list[int],
    kids: list[int],
) -> str:
    atom = mol.atoms[idx]
    elem = atom.element
    symbol = elem.symbol.lower() if atom.aromatic else elem.symbol
    chiral = _oriented_chirality(mol, idx, parent, ring_partners, kids)
    needs_bracket = (
        atom.formal_charge != 0
        or atom.isotope is not None
        or chiral is not None
        or not elem.organic_subset
        or (atom.aromatic and elem.symbol in ("N", "P", "As", "B") and atom.total_h > 0)
    )
    if not needs_bracket:
        # Bare atoms must reparse to the same hydrogen count.
        from .elements import allowed_valences

        bond_sum = mol.bond_order_sum(idx)
        fits = [v for v in allowed_valences(elem, 0) if v >= bond_sum]
        implied = (fits[0] - bond_sum) if fits else 0
        if implied != atom.total_h:
            needs_bracket = True
    if not needs_bracket:
        return symbol
    h = atom.total_h
    h_part = "" if h == 0 else ("H" if h == 1 else f"H{h}")
    charge = atom.formal_charge
    if charge == 0:
        charge_part = ""
    else:
        sign = "+" if charge > 0 else "-"
        charge_part = sign if abs(charge) == 1 else f"{sign}{abs(charge)}"
    isotope_part = "" if atom.isotope is None else str(atom.isotope)
    return f"[{isotope_part}{symbol}{chiral or ''}{h_part}{charge_part}]"


def _oriented_chirality(
    mol: Molecule,
    idx: int,
    parent: int | None,
    ring_partners: list[int],
    kids: list[int],
) -> str | None:
    """Chiral tag flipped to match the emitted neighbor order, if defined."""
    atom = mol.atoms[idx]
    if atom.chiral is None or mol.neighbor_order is None:
        return None
    if atom.total_h > 1:
        return None
    recorded = list(mol.neighbor_order[idx])
    emitted: list[int] = []
    if parent is not None:
        emitted.append(parent)
    emitted.extend([-1] * atom.total_h)
    emitted.extend(ring_partners)
    emitted.extend(kids)
    if len(recorded) != len(emitted) or len(emitted) < 3:
        return None
    if sorted(recorded) != sorted(emitted) or len(set(emitted)) != len(emitted):
        return None
    permutation = [recorded.index(x) for x in emitted]
    inversions = sum(
        1
        for i in range(len(permutation))
        for j in range(i + 1, len(permutation))
        if permutation[i] > permutation[j]
    )
    if inversions % 2 == 0:
        return atom.chiral
    return "@@" if atom.chiral == "@" else "@"
