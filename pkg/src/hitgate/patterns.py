"""Substructure patterns: a SMARTS subset, a VF2-style matcher, and
severity scoring over structural-alert catalogs.

Supported pattern language:

* atoms: organic-subset symbols (aliphatic), aromatic lowercase forms,
  ``*`` wildcard, brackets with ``#n`` (atomic number), element symbol,
  charge (``+``, ``-``, ``+2``, ``+0``), ``Hn`` (total hydrogen count),
  ``R`` (ring member), ``R0`` (acyclic), ``Dn`` (minimum degree), and
  ``&`` conjunction;
* bonds: ``-`` ``=`` ``#`` ``:`` ``~`` ``@``; an unspecified bond matches
  single-or-aromatic as in SMARTS;
* branches and ring closures as in SMILES.

Recursion ``$(...)``, disjunction ``,``, negation ``!`` and disconnected
patterns raise :class:`UnsupportedFeature`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .assets import data_path
from .elements import element_table
from .mol import Bond, BondOrder, Molecule


class PatternSyntaxError(ValueError):
    def __init__(self, position: int, expected: str):
        self.position = position
        self.expected = expected
        super().__init__(f"position {position}: expected {expected}")


class UnsupportedFeature(ValueError):
    def __init__(self, feature: str):
        self.feature = feature
        super().__init__(f"unsupported pattern feature: {feature}")


@dataclass(frozen=True)
class AtomPredicate:
    element_numbers: frozenset[int] | None = None
    aromatic: bool | None = None
    charge: int | None = None
    in_ring: bool | None = None
    min_degree: int | None = None
    total_h: int | None = None
    wildcard: bool = False

    def matches(self, mol: Molecule, idx: int) -> bool:
        if self.wildcard:
            return True
        atom = mol.atoms[idx]
        if self.element_numbers is not None:
            if atom.element.atomic_number not in self.element_numbers:
                return False
        if self.aromatic is not None and atom.aromatic != self.aromatic:
            return False
        if self.charge is not None and atom.formal_charge != self.charge:
            return False
        if self.in_ring is not None:
            ring_member = bool(mol.rings and mol.rings.atom_ring_count[idx] > 0)
            if ring_member != self.in_ring:
                return False
        if self.min_degree is not None and mol.degree(idx) < self.min_degree:
            return False
        if self.total_h is not None and atom.total_h != self.total_h:
            return False
        return True


@dataclass(frozen=True)
class BondPredicate:
    order: BondOrder | None = None
    aromatic: bool | None = None
    in_ring: bool | None = None
    any: bool = False
    default: bool = False  # unspecified bond: single or aromatic

    def matches(self, bond: Bond) -> bool:
        if self.any:
            return True
        if self.default:
            return bond.aromatic or (
                bond.order == BondOrder.SINGLE and not bond.aromatic
            )
        if self.aromatic is not None and bond.aromatic != self.aromatic:
            return False
        if self.order is not None:
            if bond.aromatic or bond.order != self.order:
                return False
        if self.in_ring is not None and bond.in_ring != self.in_ring:
            return False
        return True


@dataclass(frozen=True)
class Pattern:
    nodes: tuple[AtomPredicate, ...]
    edges: tuple[tuple[int, int, BondPredicate], ...]
    name: str = ""

    def __len__(self) -> int:
        return len(self.nodes)


_BOND_CHARS = {
    "-": BondPredicate(order=BondOrder.SINGLE, aromatic=False),
    "=": BondPredicate(order=BondOrder.DOUBLE),
    "#": BondPredicate(order=BondOrder.TRIPLE),
    ":": BondPredicate(aromatic=True),
    "~": BondPredicate(any=True),
    "@": BondPredicate(in_ring=True),
}
_DEFAULT_BOND = BondPredicate(default=True)

_ORGANIC = ("Cl", "Br", "B", "C", "N", "O", "P", "S", "F", "I")
_AROMATIC = ("b", "c", "n", "o", "p", "s")


class _PatternParser:
    def __init__(self, text: str, name: str):
        self.text = text
        self.name = name
        self.pos = 0
        self.nodes: list[AtomPredicate] = []
        self.edges: list[tuple[int, int, BondPredicate]] = []
        self.open_rings: dict[int, tuple[int, BondPredicate | None]] = {}
        self.branch_stack: list[int] = []
        self.prev: int | None = None
        self.pending: BondPredicate | None = None

    def error(self, expected: str) -> PatternSyntaxError:
        return PatternSyntaxError(self.pos, expected)

    def parse(self) -> Pattern:
        if not self.text:
            raise PatternSyntaxError(0, "non-empty pattern")
        for banned, label in ((",", "disjunction ','"), ("!", "negation '!'"), ("$", "recursive $(...)")):
            if banned in self.text:
                raise UnsupportedFeature(label)
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "(":
                if self.prev is None:
                    raise self.error("atom before branch")
                self.branch_stack.append(self.prev)
                self.pos += 1
            elif ch == ")":
                if not self.branch_stack or self.pending is not None:
                    raise self.error("atom")
                self.prev = self.branch_stack.pop()
                self.pos += 1
            elif ch in _BOND_CHARS:
                if self.pending is not None or self.prev is None:
                    raise self.error("atom")
                self.pending = _BOND_CHARS[ch]
                self.pos += 1
            elif ch == ".":
                raise UnsupportedFeature("disconnected pattern '.'")
            elif ch.isdigit():
                self.ring_closure(int(ch))
                self.pos += 1
            elif ch == "%":
                digits = self.text[self.pos + 1 : self.pos + 3]
                if len(digits) != 2 or not digits.isdigit():
                    raise self.error("two-digit ring closure")
                self.ring_closure(int(digits))
                self.pos += 3
            elif ch == "[":
                self.bracket()
            else:
                self.plain_atom()
        if self.branch_stack:
            raise self.error("closed branches")
        if self.open_rings:
            raise self.error("closed ring bonds")
        if self.pending is not None:
            raise self.error("atom after bond")
        pattern = Pattern(nodes=tuple(self.nodes), edges=tuple(self.edges), name=self.name)
        _check_connected(pattern)
        return pattern

    def add_node(self, predicate: AtomPredicate) -> None:
        idx = len(self.nodes)
        self.nodes.append(predicate)
        if self.prev is not None:
            self.edges.append((self.prev, idx, self.pending or _DEFAULT_BOND))
        self.pending = None
        self.prev = idx

    def ring_closure(self, digit: int) -> None:
        if self.prev is None:
            raise self.error("atom before ring closure")
        pending, self.pending = self.pending, None
        if digit not in self.open_rings:
            self.open_rings[digit] = (self.prev, pending)
            return
        other, other_pred = self.open_rings.pop(digit)
        predicate = pending or other_pred or _DEFAULT_BOND
        self.edges.append((other, self.prev, predicate))

    def plain_atom(self) -> None:
        text, pos = self.text, self.pos
        if text.startswith("*", pos):
            self.pos += 1
            self.add_node(AtomPredicate(wildcard=True))
            return
        for sym in _ORGANIC:
            if text.startswith(sym, pos):
                self.pos += len(sym)
                number = element_table()[sym].atomic_number
                self.add_node(
                    AtomPredicate(element_numbers=frozenset((number,)), aromatic=False)
                )
                return
        for sym in _AROMATIC:
            if text.startswith(sym, pos):
                self.pos += 1
                number = element_table()[sym.upper()].atomic_number
                self.add_node(
                    AtomPredicate(element_numbers=frozenset((number,)), aromatic=True)
                )
                return
        raise self.error("atom")

    def bracket(self) -> None:
        self.pos += 1
        element_numbers: frozenset[int] | None = None
        aromatic: bool | None = None
        charge: int | None = None
        in_ring: bool | None = None
        min_degree: int | None = None
        total_h: int | None = None
        wildcard = False
        saw_primitive = False
        while True:
            ch = self.text[self.pos : self.pos + 1]
            if not ch:
                raise self.error("]")
            if ch == "]":
                self.pos += 1
                break
            if ch == "&":
                self.pos += 1
                continue
            saw_primitive = True
            if ch == "*":
                wildcard = True
                self.pos += 1
            elif ch == "#":
                self.pos += 1
                num = self.read_int()
                if num is None:
                    raise self.error("atomic number after #")
                element_numbers = frozenset((num,))
            elif ch == "H":
                self.pos += 1
                total_h = self.read_int() or 1
            elif ch == "R":
                self.pos += 1
                count = self.read_int()
                in_ring = count != 0 if count is not None else True
            elif ch == "D":
                self.pos += 1
                deg = self.read_int()
                if deg is None:
                    raise self.error("degree after D")
                min_degree = deg
            elif ch in "+-":
                sign = 1 if ch == "+" else -1
                self.pos += 1
                count = self.read_int()
                if count is None:
                    count = 1
                    while self.text[self.pos : self.pos + 1] == ch:
                        count += 1
                        self.pos += 1
                charge = sign * count
            elif ch.isalpha():
                symbol, is_aromatic = self.read_symbol()
                element_numbers = frozenset((element_table()[symbol].atomic_number,))
                aromatic = is_aromatic
            else:
                raise self.error("bracket primitive")
        if not saw_primitive:
            raise self.error("bracket primitive")
        if wildcard:
            predicate = AtomPredicate(wildcard=True)
        else:
            predicate = AtomPredicate(
                element_numbers=element_numbers,
                aromatic=aromatic,
                charge=charge,
                in_ring=in_ring,
                min_degree=min_degree,
                total_h=total_h,
            )
        self.add_node(predicate)

    def read_symbol(self) -> tuple[str, bool]:
        known = element_table()
        ch = self.text[self.pos]
        if ch.isupper():
            two = self.text[self.pos : self.pos + 2]
            if len(two) == 2 and two[1].isalpha() and two[1].islower() and two in known:
                self.pos += 2
                return two, False
            if ch not in known:
                raise self.error("element symbol")
            self.pos += 1
            return ch, False
        two = self.text[self.pos : self.pos + 2]
        if two in ("se", "as"):
            self.pos += 2
            return two.capitalize(), True
        if ch.upper() not in known:
            raise self.error("element symbol")
        self.pos += 1
        return ch.upper(), True

    def read_int(self) -> int | None:
        digits = ""
        while self.text[self.pos : self.pos + 1].isdigit():
            digits += self.text[self.pos]
            self.pos += 1
        return int(digits) if digits else None


def _check_connected(pattern: Pattern) -> None:
    if not pattern.nodes:
        raise PatternSyntaxError(0, "at least one atom")
    adjacency: dict[int, list[int]] = {i: [] for i in range(len(pattern.nodes))}
    for i, j, _ in pattern.edges:
        adjacency[i].append(j)
        adjacency[j].append(i)
    seen = {0}
    stack = [0]
    while stack:
        for nbr in adjacency[stack.pop()]:
            if nbr not in seen:
                seen.add(nbr)
                stack.append(nbr)
    if len(seen) != len(pattern.nodes):
        raise UnsupportedFeature("disconnected pattern")


def parse_pattern(text: str, name: str = "") -> Pattern:
    return _PatternParser(text.strip(), name or text.strip()).parse()


def find_matches(mol: Molecule, pattern: Pattern) -> list[tuple[int, ...]]:
    """All injective pattern-to-molecule mappings.

    Mappings are deduplicated by matched atom set, so automorphic repeats
    collapse to one hit; results are ordered by their sorted atom indices.
    """
    n_pat = len(pattern.nodes)
    if n_pat > len(mol.atoms):
        return []
    pattern_adj: dict[int, list[tuple[int, BondPredicate]]] = {
        i: [] for i in range(n_pat)
    }
    for i, j, pred in pattern.edges:
        pattern_adj[i].append((j, pred))
        pattern_adj[j].append((i, pred))
    # Search order: node 0 first, then always a node adjacent to the mapped
    # prefix (the pattern is connected, so this covers every node).
    order: list[int] = [0]
    placed = {0}
    while len(order) < n_pat:
        nxt = min(
            i
            for i in range(n_pat)
            if i not in placed and any(j in placed for j, _ in pattern_adj[i])
        )
        order.append(nxt)
        placed.add(nxt)

    results: dict[frozenset[int], tuple[int, ...]] = {}
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def backtrack(step: int) -> None:
        if step == n_pat:
            key = frozenset(mapping.values())
            if key not in results:
                results[key] = tuple(mapping[i] for i in range(n_pat))
            return
        node = order[step]
        anchors = [(j, pred) for j, pred in pattern_adj[node] if j in mapping]
        if anchors:
            anchor, _ = anchors[0]
            candidates = [nbr for nbr, _ in mol.neighbors(mapping[anchor])]
        else:
            candidates = list(range(len(mol.atoms)))
        for cand in candidates:
            if cand in used:
                continue
            if mol.degree(cand) < len(pattern_adj[node]):
                continue
            if not pattern.nodes[node].matches(mol, cand):
                continue
            ok = True
            for j, pred in anchors:
                bond = mol.bond_between(cand, mapping[j])
                if bond is None or not pred.matches(bond):
                    ok = False
                    break
            if ok:
                mapping[node] = cand
                used.add(cand)
                backtrack(step + 1)
                del mapping[node]
                used.discard(cand)

    backtrack(0)
    return [results[key] for key in sorted(results, key=lambda k: tuple(sorted(k)))]


@dataclass(frozen=True)
class AlertEntry:
    pattern: Pattern
    severity: int
    name: str
    description: str = ""


@dataclass(frozen=True)
class AlertCatalog:
    entries: tuple[AlertEntry, ...] = ()

    def __post_init__(self):
        names = [e.name for e in self.entries]
        if len(names) != len(set(names)):
            raise ValueError("alert names must be unique")
        if any(e.severity < 0 for e in self.entries):
            raise ValueError("severities must be non-negative")


def severity_score(mol: Molecule, catalog: AlertCatalog) -> int:
    """Summed alert severities; each alert counts at most once per molecule."""
    total = 0
    for entry in catalog.entries:
        if find_matches(mol, entry.pattern):
            total += entry.severity
    return total


def matched_alerts(mol: Molecule, catalog: AlertCatalog) -> list[str]:
    return [e.name for e in catalog.entries if find_matches(mol, e.pattern)]


def load_catalog(path=None) -> AlertCatalog:
    """Load an alert catalog file (tab-separated: name, pattern, severity,
    description; ``#`` comments). Defaults to the bundled catalog."""
    resolved = path or data_path("alerts.tsv")
    entries = []
    with open(resolved, encoding="utf-8") as fh:
        header: list[str] | None = None
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if header is None:
                header = fields
                continue
            row = dict(zip(header, fields))
            entries.append(
                AlertEntry(
                    pattern=parse_pattern(row["pattern"], name=row["name"]),
                    severity=int(row["severity"]),
                    name=row["name"],
                    description=row.get("description", ""),
                )
            )
    return AlertCatalog(entries=tuple(entries))
