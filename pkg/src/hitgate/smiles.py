"""SMILES reader.

Grammar coverage: organic-subset atoms (B, C, N, O, P, S, F, Cl, Br, I),
aromatic lowercase forms, bracket atoms with isotope / chirality / H-count /
charge / atom map, bond symbols ``- = # : / \\``, branches, ring closures
(1-9 and %10-%99), and dot-separated fragments. Directional slashes and
chiral tags are stored as annotations; they never influence perception.

``parse_smiles`` returns a molecule with rings, aromaticity, kekulized
bond orders, and implicit hydrogens already perceived. Validity is *not*
enforced here: syntactically well-formed nonsense (pentavalent carbon)
parses fine and is left for ``check_validity`` to flag.
"""

from __future__ import annotations

from .aromaticity import perceive_aromaticity
from .elements import AROMATIC_ORGANIC, ORGANIC_SUBSET, UnknownElement, get_element
from .mol import Atom, Bond, BondOrder, Molecule, assign_implicit_hydrogens, build_molecule
from .rings import perceive_rings, with_ring_flags


class SmilesError(ValueError):
    """Base class for SMILES parse failures."""


class SmilesSyntaxError(SmilesError):
    def __init__(self, position: int, expected: str):
        self.position = position
        self.expected = expected
        super().__init__(f"position {position}: expected {expected}")


class UnclosedRing(SmilesError):
    def __init__(self, digit: int):
        self.digit = digit
        super().__init__(f"ring-closure {digit} never closed")


class UnclosedBranch(SmilesError):
    def __init__(self, position: int):
        self.position = position
        super().__init__(f"branch opened at position {position} never closed")


_BOND_SYMBOLS = {
    "-": BondOrder.SINGLE,
    "=": BondOrder.DOUBLE,
    "#": BondOrder.TRIPLE,
    ":": BondOrder.AROMATIC,
    "/": BondOrder.SINGLE,
    "\\": BondOrder.SINGLE,
}

_CHIRAL_TAGS = ("@@", "@")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.atoms: list[Atom] = []
        self.bonds: list[Bond] = []
        self.bond_keys: set[frozenset[int]] = set()
        self.neighbor_order: list[list[int]] = []
        # open ring closures: digit -> (atom, bond symbol, slot index, position)
        self.open_rings: dict[int, tuple[int, str | None, int, int]] = {}
        self.branch_stack: list[tuple[int, int]] = []  # (atom, source position)
        self.prev_atom: int | None = None
        self.pending_bond: str | None = None

    def error(self, expected: str) -> SmilesSyntaxError:
        return SmilesSyntaxError(self.pos, expected)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> Molecule:
        if not self.text:
            raise SmilesSyntaxError(0, "non-empty SMILES")
        while self.pos < len(self.text):
            ch = self.peek()
            if ch == "(":
                if self.prev_atom is None:
                    raise self.error("atom before branch")
                self.branch_stack.append((self.prev_atom, self.pos))
                self.pos += 1
            elif ch == ")":
                if not self.branch_stack:
                    raise self.error("matching open branch")
                if self.pending_bond is not None:
                    raise self.error("atom after bond symbol")
                self.prev_atom, _ = self.branch_stack.pop()
                self.pos += 1
            elif ch in _BOND_SYMBOLS:
                if self.pending_bond is not None or self.prev_atom is None:
                    raise self.error("atom")
                self.pending_bond = ch
                self.pos += 1
            elif ch == ".":
                if self.pending_bond is not None or self.branch_stack:
                    raise self.error("atom")
                self.prev_atom = None
                self.pos += 1
            elif ch.isdigit():
                self.ring_closure(int(ch))
                self.pos += 1
            elif ch == "%":
                self.pos += 1
                digits = self.text[self.pos : self.pos + 2]
                if len(digits) != 2 or not digits.isdigit():
                    raise self.error("two-digit ring closure")
                self.ring_closure(int(digits))
                self.pos += 2
            elif ch == "[":
                self.bracket_atom()
            else:
                self.organic_atom()
        if self.branch_stack:
            raise UnclosedBranch(self.branch_stack[-1][1])
        if self.pending_bond is not None:
            raise SmilesSyntaxError(self.pos, "atom after trailing bond")
        if self.open_rings:
            raise UnclosedRing(min(self.open_rings))
        if not self.atoms:
            raise SmilesSyntaxError(0, "at least one atom")
        return build_molecule(
            self.atoms, self.bonds, source_text=self.text, neighbor_order=self.neighbor_order
        )

    # -- atom handling ---------------------------------------------------

    def add_atom(self, atom: Atom, h_slots: int = 0) -> None:
        idx = len(self.atoms)
        self.atoms.append(atom)
        order: list[int] = []
        self.neighbor_order.append(order)
        if self.prev_atom is not None:
            self.connect(self.prev_atom, idx, self.pending_bond)
            order.append(self.prev_atom)
        order.extend([-1] * h_slots)
        self.pending_bond = None
        self.prev_atom = idx

    def connect(self, a: int, b: int, symbol: str | None) -> None:
        key = frozenset((a, b))
        if a == b:
            raise self.error("distinct atoms on bond")
        if key in self.bond_keys:
            raise self.error("no duplicate bond")
        self.bond_keys.add(key)
        if symbol is None:
            both_aromatic = self.atoms[a].input_aromatic and self.atoms[b].input_aromatic
            order = BondOrder.AROMATIC if both_aromatic else BondOrder.SINGLE
            direction = None
        else:
            order = _BOND_SYMBOLS[symbol]
            direction = symbol if symbol in ("/", "\\") else None
        self.bonds.append(Bond(a=a, b=b, order=order, direction=direction))
        self.neighbor_order[a].append(b)

    def ring_closure(self, digit: int) -> None:
        if self.prev_atom is None:
            raise self.error("atom before ring closure")
        symbol = self.pending_bond
        self.pending_bond = None
        if digit not in self.open_rings:
            slot = len(self.neighbor_order[self.prev_atom])
            self.neighbor_order[self.prev_atom].append(-2)  # patched at close
            self.open_rings[digit] = (self.prev_atom, symbol, slot, self.pos)
            return
        other, other_symbol, slot, _ = self.open_rings.pop(digit)
        if other == self.prev_atom:
            raise self.error("ring closure to a different atom")
        if symbol and other_symbol and symbol != other_symbol:
            raise self.error("consistent ring-closure bond symbols")
        chosen = symbol or other_symbol
        a, b = other, self.prev_atom
        key = frozenset((a, b))
        if key in self.bond_keys:
            raise self.error("no duplicate ring bond")
        self.bond_keys.add(key)
        if chosen is None:
            both_aromatic = self.atoms[a].input_aromatic and self.atoms[b].input_aromatic
            order = BondOrder.AROMATIC if both_aromatic else BondOrder.SINGLE
            direction = None
        else:
            order = _BOND_SYMBOLS[chosen]
            direction = chosen if chosen in ("/", "\\") else None
        self.bonds.append(Bond(a=a, b=b, order=order, direction=direction))
        self.neighbor_order[a][slot] = b
        self.neighbor_order[b].append(a)

    def organic_atom(self) -> None:
        text, pos = self.text, self.pos
        for sym in ORGANIC_SUBSET:
            if text.startswith(sym, pos):
                self.pos += len(sym)
                self.add_atom(Atom(element=get_element(sym)))
                return
        for sym in AROMATIC_ORGANIC:
            if text.startswith(sym, pos):
                self.pos += 1
                elem = get_element(sym.upper())
                if not elem.aromatic_ok:
                    raise self.error(f"aromatic form of {sym.upper()}")
                self.add_atom(Atom(element=elem, input_aromatic=True, aromatic=False))
                return
        if text.startswith("*", pos):
            self.pos += 1
            self.add_atom(Atom(element=get_element("*")))
            return
        raise self.error("atom symbol")

    def bracket_atom(self) -> None:
        start = self.pos
        self.pos += 1  # consume [
        isotope = self.read_int()
        symbol, aromatic = self.read_symbol()
        chiral = None
        for tag in _CHIRAL_TAGS:
            if self.text.startswith(tag, self.pos):
                chiral = tag
                self.pos += len(tag)
                break
        h_count = 0
        if self.peek() == "H":
            self.pos += 1
            h_count = self.read_int() or 1
        charge = self.read_charge()
        if self.peek() == ":":
            self.pos += 1
            if self.read_int() is None:
                raise self.error("atom-map number")
        if self.peek() != "]":
            raise self.error("]")
        self.pos += 1
        elem = get_element(symbol)
        if aromatic and not elem.aromatic_ok:
            raise SmilesSyntaxError(start, f"aromatic form of {symbol}")
        self.add_atom(
            Atom(
                element=elem,
                formal_charge=charge,
                explicit_h=h_count,
                isotope=isotope,
                bracket=True,
                input_aromatic=aromatic,
                chiral=chiral,
            ),
            h_slots=h_count,
        )

    def read_int(self) -> int | None:
        digits = ""
        while self.peek().isdigit():
            digits += self.peek()
            self.pos += 1
        return int(digits) if digits else None

    def read_symbol(self) -> tuple[str, bool]:
        from .elements import element_table

        known = element_table()
        ch = self.peek()
        if ch == "*":
            self.pos += 1
            return "*", False
        if ch.isupper():
            two = self.text[self.pos : self.pos + 2]
            if len(two) == 2 and two[1].isalpha() and two[1].islower():
                if two in known:
                    self.pos += 2
                    return two, False
                if ch not in known:
                    raise UnknownElement(two)
            if ch not in known:
                raise UnknownElement(ch)
            self.pos += 1
            return ch, False
        if ch.islower():
            two = self.text[self.pos : self.pos + 2]
            if two in ("se", "as"):
                self.pos += 2
                return two.capitalize(), True
            if ch.upper() not in known:
                raise UnknownElement(ch)
            self.pos += 1
            return ch.upper(), True
        raise self.error("element symbol")

    def read_charge(self) -> int:
        ch = self.peek()
        if ch not in "+-":
            return 0
        sign = 1 if ch == "+" else -1
        self.pos += 1
        count = self.read_int()
        if count is not None:
            return sign * count
        magnitude = 1
        while self.peek() == ch:
            magnitude += 1
            self.pos += 1
        return sign * magnitude


def parse_smiles(text: str) -> Molecule:
    """Parse one SMILES string into a fully perceived molecule.

    Raises :class:`SmilesSyntaxError`, :class:`UnclosedRing`,
    :class:`UnclosedBranch` or :class:`~hitgate.elements.UnknownElement`
    for malformed input.
    """
    mol = _Parser(text.strip()).parse()
    mol = with_ring_flags(mol, perceive_rings(mol))
    mol = perceive_aromaticity(mol)
    return assign_implicit_hydrogens(mol)
