"""Element data: symbols, masses, allowed valences, charge adjustment.

The element table is loaded from the versioned ``elements.tsv`` asset.
Valence rules follow the usual organic-subset model: an atom is valent when
the sum of its bond orders plus hydrogens equals one of the element's
allowed valences after charge adjustment.

Charge adjustment (documented model):

* boron: allowed valence ``3 - charge`` (borate B(-) binds four times);
* carbon group (C, Si): ``4 - |charge|`` (both carbanion and carbocation
  are three-coordinate);
* elements right of carbon (N, O, P, S, halogens, Se, As):
  ``base + charge`` for each base valence (N+ allows 4, O- allows 1,
  N- allows 2, Cl- allows 0);
* hydrogen and metals: ``base - |charge|`` (Na+, Ca2+ and hydride H- are
  bare, zero-bond ions).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .assets import read_table


@dataclass(frozen=True, slots=True)
class Element:
    """Immutable element record from the bundled table."""

    symbol: str
    atomic_number: int
    standard_mass: float
    default_valences: tuple[int, ...]
    organic_subset: bool
    aromatic_ok: bool


class UnknownElement(ValueError):
    """Raised for a symbol absent from the element table."""

    def __init__(self, symbol: str):
        self.symbol = symbol
        super().__init__(f"unknown element symbol: {symbol!r}")


@lru_cache(maxsize=1)
def element_table() -> dict[str, Element]:
    table: dict[str, Element] = {}
    for row in read_table("elements.tsv"):
        valences: tuple[int, ...]
        if row["default_valences"] == "-":
            valences = ()
        else:
            valences = tuple(int(v) for v in row["default_valences"].split(","))
        elem = Element(
            symbol=row["symbol"],
            atomic_number=int(row["atomic_number"]),
            standard_mass=float(row["standard_mass"]),
            default_valences=valences,
            organic_subset=row["organic_subset"] == "1",
            aromatic_ok=row["aromatic_ok"] == "1",
        )
        table[elem.symbol] = elem
    return table


def get_element(symbol: str) -> Element:
    """Look up an element by its exact (case-sensitive) symbol."""
    try:
        return element_table()[symbol]
    except KeyError:
        raise UnknownElement(symbol) from None


HYDROGEN_MASS = 1.008

# Elements whose negative charge adds a bond (electron-deficient side).
_BORON_GROUP = {5}
# Elements where any charge removes a bond.
_CARBON_GROUP = {6, 14}
# Hydrogen and metals: ionization strips bonds in either direction.
_ELECTROPOSITIVE = {1, 3, 11, 12, 13, 19, 20, 26, 29, 30, 47, 50, 78, 79, 80}


def allowed_valences(element: Element, charge: int) -> tuple[int, ...]:
    """Charge-adjusted allowed total bond-order sums, ascending.

    Returns an empty tuple when the element carries no valence model;
    such atoms are only accepted as bare (degree-0) ions downstream.
    """
    base = element.default_valences
    if not base:
        return ()
    num = element.atomic_number
    if num in _BORON_GROUP:
        adjusted = (v - charge for v in base)
    elif num in _CARBON_GROUP or num in _ELECTROPOSITIVE:
        adjusted = (v - abs(charge) for v in base)
    else:
        adjusted = (v + charge for v in base)
    return tuple(sorted(v for v in adjusted if v >= 0))


@lru_cache(maxsize=1)
def pi_electron_table() -> dict[str, int]:
    """Hueckel contribution per atom category (see pi_electrons.tsv)."""
    return {row["category"]: int(row["electrons"]) for row in read_table("pi_electrons.tsv")}


# SMILES two-letter organic-subset symbols are limited to Cl and Br;
# everything else un-bracketed is single-letter.
ORGANIC_SUBSET = ("Cl", "Br", "B", "C", "N", "O", "P", "S", "F", "I")
AROMATIC_ORGANIC = ("b", "c", "n", "o", "p", "s")
