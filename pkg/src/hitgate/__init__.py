"""hitgate: hit-likeness filtering and evaluation toolkit for small molecules."""

__version__ = "0.1.0"

from .canon import CanonicalForm, InvalidMolecule, canonical_key, canonicalize, write_smiles
from .mol import (
    Atom,
    Bond,
    BondOrder,
    Molecule,
    RingInfo,
    ValidityReport,
    assign_implicit_hydrogens,
    check_validity,
    heavy_atom_count,
    molecular_formula,
)
from .rings import perceive_rings
from .aromaticity import perceive_aromaticity
from .smiles import SmilesError, SmilesSyntaxError, UnclosedBranch, UnclosedRing, parse_smiles

__all__ = [
    "Atom",
    "Bond",
    "BondOrder",
    "CanonicalForm",
    "InvalidMolecule",
    "Molecule",
    "RingInfo",
    "SmilesError",
    "SmilesSyntaxError",
    "UnclosedBranch",
    "UnclosedRing",
    "ValidityReport",
    "assign_implicit_hydrogens",
    "canonical_key",
    "canonicalize",
    "check_validity",
    "heavy_atom_count",
    "molecular_formula",
    "parse_smiles",
    "perceive_aromaticity",
    "perceive_rings",
    "write_smiles",
]
