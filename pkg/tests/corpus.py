"""Deterministic 1,000-molecule drug-like test corpus.

Built as 25 scaffold templates x 40 substituents. The set spans charged
species, aromatic heterocycles, fused and bridged ring systems, and a
ten-membered ring written with two-digit closures. Every entry parses,
passes validity, and round-trips (asserted by the acceptance suite).
"""

from __future__ import annotations

SCAFFOLDS = [
    "c1ccc({})cc1",                 # benzene
    "c1ccc({})nc1",                 # pyridine
    "c1cnc({})cn1",                 # pyrazine
    "c1ccc2cc({})ccc2c1",           # naphthalene
    "c1ccc2c(c1)cc({})[nH]2",       # indole
    "c1ccc2nc({})ccc2c1",           # quinoline
    "c1ccc2c(c1)nc({})[nH]2",       # benzimidazole
    "c1ccc2c(c1)cc({})o2",          # benzofuran
    "c1ccc2c(c1)cc({})s2",          # benzothiophene
    "c1cc({})oc1",                  # furan
    "c1cc({})sc1",                  # thiophene
    "c1cc({})n(C)n1",               # N-methylpyrazole
    "c1nc({})n(C)c1",               # N-methylimidazole
    "c1cc({})no1",                  # isoxazole
    "c1nc({})sc1",                  # thiazole
    "C1CCC({})CC1",                 # cyclohexane
    "C1CCC({})NC1",                 # piperidine
    "C1COC({})CN1",                 # morpholine
    "C1CC2CCC({})C1C2",             # norbornane
    "C%10CCCCCCCC({})C%10",         # cyclodecane, two-digit closure
    "c1ccc2c(c1)CCC({})C2",         # tetralin
    "O=c1cc({})oc2ccccc12",         # chromone
    "O=c1cc({})[nH]c(=O)[nH]1",     # uracil
    "CN1CCC({})CN1",                # N-methylpiperazine
    "C1CC1c1ccc({})cc1",            # cyclopropyl-benzene
]

SUBSTITUENTS = [
    "C", "CC", "CCC", "C(C)C", "C(C)(C)C", "CO", "CCO", "OC", "OCC", "O",
    "N", "NC", "N(C)C", "NC(C)=O", "C(N)=O", "C(=O)O", "C(=O)OC", "C(=O)C",
    "C#N", "C(F)(F)F", "F", "Cl", "Br", "I", "S", "SC", "S(C)(=O)=O",
    "S(N)(=O)=O", "[N+](=O)[O-]", "C=C", "CC#N", "CCl", "CBr", "OC(F)F",
    "N9CCOCC9", "N9CCNCC9", "C9CC9", "CCN", "[O-]", "[NH3+]",
]


def corpus_smiles() -> list[str]:
    """The full 1,000-entry corpus, in deterministic order."""
    return [
        scaffold.format(sub) for scaffold in SCAFFOLDS for sub in SUBSTITUENTS
    ]
