"""Pattern parsing, matcher-vs-brute-force equivalence, severity scoring."""

import random

import pytest

from hitgate import parse_smiles
from hitgate.patterns import (
    AlertCatalog,
    AlertEntry,
    PatternSyntaxError,
    UnsupportedFeature,
    find_matches,
    load_catalog,
    parse_pattern,
    severity_score,
)

from helpers import brute_force_subgraph_matches, permute_molecule, random_permutation


class TestParsePattern:
    def test_nitro_three_nodes(self):
        pattern = parse_pattern("[N+](=O)[O-]")
        assert len(pattern.nodes) == 3
        assert len(pattern.edges) == 2

    def test_aromatic_ring_pattern(self):
        pattern = parse_pattern("c1ccccc1")
        assert len(pattern.nodes) == 6
        assert len(pattern.edges) == 6

    @pytest.mark.parametrize(
        "text,feature",
        [
            ("[$(CC)]", "$"),
            ("[C,N]", ","),
            ("[!C]", "!"),
            ("C.C", "."),
        ],
    )
    def test_unsupported_features(self, text, feature):
        with pytest.raises(UnsupportedFeature):
            parse_pattern(text)

    def test_syntax_error(self):
        with pytest.raises(PatternSyntaxError):
            parse_pattern("C(")

    def test_wildcard_and_primitives(self):
        pattern = parse_pattern("[#6]~*")
        assert pattern.nodes[0].element_numbers == frozenset((6,))
        assert pattern.nodes[1].wildcard


class TestFindMatches:
    def test_nitro_on_nitrobenzene(self):
        mol = parse_smiles("[O-][N+](=O)c1ccccc1")
        matches = find_matches(mol, parse_pattern("[N+](=O)[O-]"))
        assert len(matches) == 1

    def test_benzene_ring_on_benzene_collapses_automorphs(self):
        mol = parse_smiles("c1ccccc1")
        matches = find_matches(mol, parse_pattern("c1ccccc1"))
        assert len(matches) == 1
        assert sorted(matches[0]) == [0, 1, 2, 3, 4, 5]

    def test_no_match(self):
        mol = parse_smiles("CC")
        assert find_matches(mol, parse_pattern("[N+](=O)[O-]")) == []

    def test_double_bond_does_not_match_aromatic(self):
        benzene = parse_smiles("c1ccccc1")
        assert find_matches(benzene, parse_pattern("C=C")) == []
        assert len(find_matches(benzene, parse_pattern("c:c"))) == 6

    def test_ring_primitive(self):
        mol = parse_smiles("C1CCC1C")
        in_ring = find_matches(mol, parse_pattern("[C&R]"))
        assert len(in_ring) == 4
        acyclic = find_matches(mol, parse_pattern("[CR0]"))
        assert len(acyclic) == 1

    BRUTE_FORCE_MOLECULES = [
        "CCO",
        "CC(=O)N",
        "c1ccccc1",
        "c1ccncc1",
        "CC(C)C=O",
        "[O-][N+](=O)C",
        "OCC(O)CO",
        "C1CC1C#N",
        "Oc1ccccc1O",
        "CSC",
        "C1CCCCC1",
        "NC(=S)N",
    ]
    BRUTE_FORCE_PATTERNS = [
        "C",
        "CC",
        "C=O",
        "CO",
        "[OH1]",
        "c1ccccc1",
        "cc",
        "[#7]",
        "C~O",
        "[CH3]",
        "C(=O)N",
        "[C&R]",
        "*=*",
        "[N+](=O)[O-]",
        "C#N",
    ]

    def test_equivalence_with_brute_force(self):
        pairs = 0
        for smi in self.BRUTE_FORCE_MOLECULES:
            mol = parse_smiles(smi)
            for pat_text in self.BRUTE_FORCE_PATTERNS:
                pattern = parse_pattern(pat_text)
                got = {frozenset(m) for m in find_matches(mol, pattern)}
                expected = brute_force_subgraph_matches(mol, pattern)
                assert got == expected, f"{pat_text} on {smi}"
                pairs += 1
        assert pairs >= 100

    def test_match_count_permutation_invariant(self):
        rng = random.Random(3)
        mol = parse_smiles("Oc1ccc(O)cc1")
        pattern = parse_pattern("Oc1ccc(O)cc1")
        base = len(find_matches(mol, pattern))
        for _ in range(20):
            permuted = permute_molecule(mol, random_permutation(len(mol.atoms), rng))
            assert len(find_matches(permuted, pattern)) == base

    def test_deterministic_ordering(self):
        mol = parse_smiles("OCC(O)CO")
        matches = find_matches(mol, parse_pattern("CO"))
        assert matches == sorted(matches, key=lambda m: tuple(sorted(m)))


class TestSeverity:
    def test_empty_catalog(self):
        assert severity_score(parse_smiles("CCO"), AlertCatalog()) == 0

    def test_severity_eleven_single_alert(self):
        catalog = AlertCatalog(
            entries=(
                AlertEntry(pattern=parse_pattern("[N-]=[N+]=N"), severity=11, name="azide"),
            )
        )
        assert severity_score(parse_smiles("CN=[N+]=[N-]"), catalog) == 11

    def test_two_alerts_sum_once_each(self):
        catalog = AlertCatalog(
            entries=(
                AlertEntry(pattern=parse_pattern("[OH1]"), severity=4, name="hydroxyl"),
                AlertEntry(pattern=parse_pattern("C=O"), severity=7, name="carbonyl"),
            )
        )
        # Two hydroxyls and one carbonyl: per-alert counting gives 4 + 7.
        assert severity_score(parse_smiles("OCC(=O)CO"), catalog) == 11

    def test_monotone_under_catalog_growth(self):
        mol = parse_smiles("OCC(=O)CO")
        first = AlertCatalog(
            entries=(AlertEntry(pattern=parse_pattern("[OH1]"), severity=4, name="a"),)
        )
        second = AlertCatalog(
            entries=first.entries
            + (AlertEntry(pattern=parse_pattern("C=O"), severity=2, name="b"),)
        )
        assert severity_score(mol, second) >= severity_score(mol, first)

    def test_duplicate_names_rejected(self):
        entry = AlertEntry(pattern=parse_pattern("C"), severity=1, name="dup")
        with pytest.raises(ValueError):
            AlertCatalog(entries=(entry, entry))


class TestBundledCatalog:
    def test_loads_and_fires(self):
        catalog = load_catalog()
        assert len(catalog.entries) >= 20
        assert all(0 <= e.severity <= 11 for e in catalog.entries)
        # A clean molecule scores zero; an azide trips an instant-fail alert.
        assert severity_score(parse_smiles("CCO"), catalog) == 0
        assert severity_score(parse_smiles("CCN=[N+]=[N-]"), catalog) >= 11

    def test_quinone_alert(self):
        catalog = load_catalog()
        assert severity_score(parse_smiles("O=C1C=CC(=O)C=C1"), catalog) >= 11
