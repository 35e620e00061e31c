"""Filter criteria, failure-table accounting, dataset pass."""

import pytest

from hitgate import parse_smiles
from hitgate.hitfilter import (
    CRITERIA,
    DatasetRecord,
    EmptyCohort,
    FilterConfig,
    apply_filters,
    failure_table,
    filter_dataset,
    largest_fragment,
    load_filter_config,
    within,
)


class TestThresholdLogic:
    # Boundary fixtures straddling each pipeline threshold.
    @pytest.mark.parametrize(
        "value,low,high,expected",
        [
            (149.99, 150.0, 350.0, False),
            (150.01, 150.0, 350.0, True),
            (349.99, 150.0, 350.0, True),
            (350.01, 150.0, 350.0, False),
            (0.99, 1.0, 3.0, False),
            (1.01, 1.0, 3.0, True),
            (2.99, 1.0, 3.0, True),
            (3.01, 1.0, 3.0, False),
        ],
    )
    def test_window_boundaries(self, value, low, high, expected):
        assert within(value, low, high) is expected

    @pytest.mark.parametrize("sas,expected", [(4.99, True), (5.01, False)])
    def test_sas_boundary(self, sas, expected):
        assert (sas <= FilterConfig().sas_max) is expected

    @pytest.mark.parametrize("sev,expected", [(10, True), (11, False)])
    def test_severity_boundary(self, sev, expected):
        assert (sev <= FilterConfig().sev_max) is expected

    @pytest.mark.parametrize(
        "rings,passes_lower,passes_upper",
        [(0, False, True), (1, True, True), (4, True, True), (5, True, False)],
    )
    def test_ring_count_boundaries(self, rings, passes_lower, passes_upper):
        config = FilterConfig()
        assert (rings >= config.ring_min) is passes_lower
        assert (rings <= config.ring_max) is passes_upper


class TestApplyFilters:
    def test_all_criteria_recorded(self):
        outcome = apply_filters(parse_smiles("CC(=O)Oc1ccccc1C(=O)O"))
        assert set(outcome.records) == set(CRITERIA)
        for record in outcome.records.values():
            assert record.passed in (True, False)

    def test_acyclic_fails_nor(self):
        outcome = apply_filters(parse_smiles("CCO"))
        assert not outcome.records["NoR"].passed
        assert not outcome.all_pass

    def test_silicon_fails_element(self):
        outcome = apply_filters(parse_smiles("C[Si](C)(C)c1ccccc1"))
        assert not outcome.records["Elem"].passed
        assert outcome.records["Elem"].value == "Si"

    def test_heavy_molecule_fails_mw(self):
        smi = "CCCCCCCCCCCCCCCCCCCCCCCCc1ccc(cc1)C(=O)NCCCCCCCCCC"
        outcome = apply_filters(parse_smiles(smi))
        assert not outcome.records["MW"].passed
        assert outcome.records["MW"].value > 350

    def test_severity_eleven_fails(self):
        outcome = apply_filters(parse_smiles("CCN=[N+]=[N-]c1ccccc1"))
        # azide alert carries severity 11 in the bundled catalog
        assert outcome.records["Sev"].value >= 11
        assert not outcome.records["Sev"].passed

    def test_pchembl_gating(self):
        mol = parse_smiles("Cc1ccccc1")
        without = apply_filters(mol)
        assert not without.records["pChEMBL"].applicable
        with_low = apply_filters(mol, annotations={"pchembl": 4.2})
        assert with_low.records["pChEMBL"].applicable
        assert not with_low.records["pChEMBL"].passed
        with_high = apply_filters(mol, annotations={"pchembl": 6.1})
        assert with_high.records["pChEMBL"].passed

    def test_no_short_circuit(self):
        # Fails MW, logP and rings at once; every record still has a value.
        outcome = apply_filters(parse_smiles("CCCCCCCCCCCCCCCCCCCCCCCCCCCCCCCC"))
        measured = [k for k in ("Sev", "SAS", "MW", "logP") if outcome.records[k].value is not None]
        assert measured == ["Sev", "SAS", "MW", "logP"]

    def test_unclassifiable_logp_conservative(self):
        outcome = apply_filters(parse_smiles("C[Si](C)(C)c1ccccc1"))
        assert outcome.records["logP"].value is None
        assert not outcome.records["logP"].passed

    def test_passing_molecule(self):
        # Classic hit-like drug: inside every window.
        outcome = apply_filters(parse_smiles("CC(=O)Nc1ccc(O)cc1"))
        failing = [k for k, r in outcome.records.items() if r.applicable and not r.passed]
        assert outcome.all_pass, failing

    def test_monotone_threshold_widening(self):
        from dataclasses import replace as _  # noqa: F401

        mol = parse_smiles("CC(C)Cc1ccc(cc1)C(C)C(=O)O")
        narrow = apply_filters(mol, FilterConfig())
        wide = apply_filters(
            mol,
            FilterConfig(mw_min=0.1, mw_max=1000.0, logp_min=-10.0, logp_max=10.0,
                         sas_max=10.0, ring_min=0, ring_max=99, max_ring_size=99),
        )
        for key in CRITERIA:
            if narrow.records[key].applicable and narrow.records[key].passed:
                assert wide.records[key].passed


class TestFailureTable:
    def outcome(self, failing: set[str]):
        from hitgate.hitfilter import CriterionRecord, FilterOutcome

        records = {
            k: CriterionRecord(value=0, passed=k not in failing, applicable=True)
            for k in CRITERIA
        }
        records["pChEMBL"] = CriterionRecord(None, True, applicable=False)
        return FilterOutcome(molecule_id="x", records=records)

    def test_all_zero(self):
        table = failure_table([self.outcome(set()) for _ in range(4)])
        assert table.all_pct == 0.0
        assert all(v == 0.0 for k, v in table.percentages.items() if v is not None)

    def test_hand_count_half_failing_mw(self):
        table = failure_table([self.outcome({"MW"}), self.outcome(set())])
        assert table.percentages["MW"] == 50.0
        assert table.all_pct == 50.0

    def test_union_bound(self):
        outcomes = [
            self.outcome({"MW", "logP"}),
            self.outcome({"SAS"}),
            self.outcome(set()),
        ]
        table = failure_table(outcomes)
        total = sum(v for v in table.percentages.values() if v is not None)
        assert table.all_pct <= total + 1e-9

    def test_header_exact(self):
        table = failure_table([self.outcome(set())])
        assert table.csv_lines()[0] == "Sev.,SAS,MW,logP,NoR,<4R,<8t,<2R6t,AromR,FusedR,All"

    def test_empty_cohort(self):
        with pytest.raises(EmptyCohort):
            failure_table([])


class TestFilterDataset:
    def records(self, entries):
        return [
            DatasetRecord(line=i + 1, smiles=smi, molecule_id=f"m{i}", pchembl=p)
            for i, (smi, p) in enumerate(entries)
        ]

    def test_invalid_excluded_from_denominator(self):
        entries = [
            ("CC(=O)Nc1ccc(O)cc1", None),  # passes
            ("C(C)(C)(C)(C)C", None),              # invalid: never filtered
            ("CCCCCCCCCCCCCCCCCCCCCCCCCCCC", None),  # fails MW and rings
            ("CCC(", None),                          # syntax error
        ]
        result = filter_dataset(self.records(entries))
        assert len(result.rejects) == 2
        assert result.table.cohort_size == 2
        assert len(result.passing) == 1

    def test_empty_input(self):
        result = filter_dataset([])
        assert result.table is None
        assert result.passing == []

    def test_multi_fragment_rejected_or_normalized(self):
        entries = [("[Na+].CC(=O)Nc1ccc(O)cc1", None)]
        strict = filter_dataset(self.records(entries))
        assert not strict.outcomes[0].records["Frag"].passed
        normalized = filter_dataset(self.records(entries), use_largest_fragment=True)
        assert normalized.outcomes[0].records["Frag"].passed
        assert normalized.outcomes[0].records["Elem"].passed

    def test_largest_fragment_picks_heavier_side(self):
        mol = parse_smiles("[Na+].CCO")
        kept = largest_fragment(mol)
        assert len(kept.atoms) == 3

    def test_deterministic(self):
        entries = [("CC(=O)Nc1ccc(O)cc1", None), ("CCO", None)]
        a = filter_dataset(self.records(entries))
        b = filter_dataset(self.records(entries))
        assert a.table.csv_lines() == b.table.csv_lines()
        assert a.passing == b.passing


class TestConfigFile:
    def test_round_trip(self, tmp_path):
        text = """
        # hit filter settings
        sev_max = 8
        mw_min = 100
        mw_max = 400
        logp_min = 0.5
        logp_max = 4.5
        sas_max = 6
        ring_min = 0
        ring_max = 5
        ban_fused = false
        element_whitelist = C, N, O
        """
        path = tmp_path / "filter.conf"
        path.write_text(text)
        config = load_filter_config(path)
        assert config.sev_max == 8
        assert config.mw_max == 400.0
        assert config.ban_fused is False
        assert config.element_whitelist == frozenset({"C", "N", "O"})

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.conf"
        path.write_text("no_such_option = 1\n")
        with pytest.raises(ValueError):
            load_filter_config(path)

    def test_invalid_window_rejected(self):
        with pytest.raises(ValueError):
            FilterConfig(mw_min=400, mw_max=300)
