"""Multi-stage hit-likeness filter with per-criterion outcome records.

Thirteen criteria are evaluated for every molecule, without short-circuit,
so failure statistics stay complete: alert severity (Sev), synthetic
accessibility (SAS), molecular weight (MW), logP, ring count lower/upper
bounds (NoR / R4), maximum ring size (T8), count of rings larger than six
atoms (R6T2), small-aromatic and fused-ring exclusions (AromR / FusedR),
element whitelist (Elem), fragment count (Frag), and the annotation-gated
activity floor (pChEMBL). Generated molecules without activity annotations
simply mark pChEMBL non-applicable.

Failure tables render with the canonical report column set
``Sev. SAS MW logP NoR <4R <8t <2R6t AromR FusedR All``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterable, Iterator

from .canon import write_smiles
from .descriptors import UnclassifiableAtom, crippen_logp, molecular_weight, ring_stats
from .mol import Molecule, check_validity
from .patterns import AlertCatalog, load_catalog, severity_score
from .sascore import sa_score
from .scaffolds import extract_subgraph
from .smiles import SmilesError, parse_smiles

CRITERIA = (
    "Sev",
    "SAS",
    "MW",
    "logP",
    "NoR",
    "R4",
    "T8",
    "R6T2",
    "AromR",
    "FusedR",
    "Elem",
    "Frag",
    "pChEMBL",
)

# Report-facing column labels for the failure table.
TABLE_COLUMNS = ("Sev.", "SAS", "MW", "logP", "NoR", "<4R", "<8t", "<2R6t", "AromR", "FusedR")
TABLE_KEY_BY_COLUMN = {
    "Sev.": "Sev",
    "SAS": "SAS",
    "MW": "MW",
    "logP": "logP",
    "NoR": "NoR",
    "<4R": "R4",
    "<8t": "T8",
    "<2R6t": "R6T2",
    "AromR": "AromR",
    "FusedR": "FusedR",
}

DEFAULT_ELEMENTS = frozenset({"C", "N", "O", "F", "P", "S", "Cl", "Br", "I"})


class EmptyCohort(ValueError):
    pass


@dataclass(frozen=True)
class FilterConfig:
    sev_max: int = 10
    mw_min: float = 150.0
    mw_max: float = 350.0
    logp_min: float = 1.0
    logp_max: float = 3.0
    sas_max: float = 5.0
    ring_min: int = 1
    ring_max: int = 4
    max_ring_size: int = 8
    max_rings_gt6: int = 2
    ban_fused: bool = True
    ban_small_aromatic: bool = True
    strict_fusion: bool = False
    element_whitelist: frozenset[str] = DEFAULT_ELEMENTS
    pchembl_min: float = 5.0
    reject_multi_fragment: bool = True

    def __post_init__(self):
        if not self.mw_min < self.mw_max:
            raise ValueError("mw_min must be below mw_max")
        if not self.logp_min < self.logp_max:
            raise ValueError("logp_min must be below logp_max")
        if self.ring_min > self.ring_max:
            raise ValueError("ring_min must not exceed ring_max")


def within(value: float, low: float, high: float) -> bool:
    """Inclusive interval check used by every windowed criterion."""
    return low <= value <= high


@dataclass(frozen=True)
class CriterionRecord:
    value: object
    passed: bool
    applicable: bool = True


@dataclass(frozen=True)
class FilterOutcome:
    molecule_id: str
    records: dict[str, CriterionRecord]

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.records.values() if r.applicable)


@lru_cache(maxsize=1)
def _default_catalog() -> AlertCatalog:
    return load_catalog()


def apply_filters(
    mol: Molecule,
    config: FilterConfig | None = None,
    annotations: dict | None = None,
    molecule_id: str = "",
    catalog: AlertCatalog | None = None,
) -> FilterOutcome:
    """Evaluate every criterion; descriptor failures fail conservatively."""
    config = config or FilterConfig()
    catalog = catalog if catalog is not None else _default_catalog()
    records: dict[str, CriterionRecord] = {}

    sev = severity_score(mol, catalog)
    records["Sev"] = CriterionRecord(sev, sev <= config.sev_max)

    try:
        sas = sa_score(mol)
        records["SAS"] = CriterionRecord(round(sas, 4), sas <= config.sas_max)
    except Exception:
        records["SAS"] = CriterionRecord(None, False)

    mw = molecular_weight(mol)
    records["MW"] = CriterionRecord(round(mw, 4), within(mw, config.mw_min, config.mw_max))

    try:
        logp = crippen_logp(mol)
        records["logP"] = CriterionRecord(
            round(logp, 4), within(logp, config.logp_min, config.logp_max)
        )
    except UnclassifiableAtom:
        records["logP"] = CriterionRecord(None, False)

    stats = ring_stats(mol, strict_fusion=config.strict_fusion)
    records["NoR"] = CriterionRecord(stats.ring_count, stats.ring_count >= config.ring_min)
    records["R4"] = CriterionRecord(stats.ring_count, stats.ring_count <= config.ring_max)
    records["T8"] = CriterionRecord(
        stats.max_ring_size, stats.max_ring_size <= config.max_ring_size
    )
    records["R6T2"] = CriterionRecord(stats.rings_gt6, stats.rings_gt6 <= config.max_rings_gt6)
    records["AromR"] = CriterionRecord(
        stats.has_small_aromatic,
        not stats.has_small_aromatic,
        applicable=config.ban_small_aromatic,
    )
    records["FusedR"] = CriterionRecord(
        stats.has_fused, not stats.has_fused, applicable=config.ban_fused
    )

    offending = sorted(
        {a.element.symbol for a in mol.atoms if a.element.symbol not in config.element_whitelist}
    )
    records["Elem"] = CriterionRecord(",".join(offending) or None, not offending)

    fragments = len(mol.components())
    records["Frag"] = CriterionRecord(
        fragments, fragments == 1, applicable=config.reject_multi_fragment
    )

    pchembl = (annotations or {}).get("pchembl")
    if pchembl is None:
        records["pChEMBL"] = CriterionRecord(None, True, applicable=False)
    else:
        records["pChEMBL"] = CriterionRecord(pchembl, pchembl >= config.pchembl_min)

    return FilterOutcome(molecule_id=molecule_id, records=records)


@dataclass(frozen=True)
class FailureTable:
    """Per-criterion failure percentages over a cohort (None = no applicable)."""

    percentages: dict[str, float | None]
    all_pct: float
    cohort_size: int

    def csv_lines(self) -> list[str]:
        header = ",".join(TABLE_COLUMNS + ("All",))
        cells = []
        for column in TABLE_COLUMNS:
            value = self.percentages[TABLE_KEY_BY_COLUMN[column]]
            cells.append("" if value is None else f"{value:.2f}")
        cells.append(f"{self.all_pct:.2f}")
        return [header, ",".join(cells)]

    def as_json_dict(self) -> dict:
        payload: dict[str, object] = {}
        for column in TABLE_COLUMNS:
            payload[column] = self.percentages[TABLE_KEY_BY_COLUMN[column]]
        payload["All"] = self.all_pct
        payload["cohort_size"] = self.cohort_size
        payload["additional"] = {
            key: self.percentages[key]
            for key in ("Elem", "Frag", "pChEMBL")
            if key in self.percentages
        }
        return payload


def failure_table(outcomes: list[FilterOutcome]) -> FailureTable:
    if not outcomes:
        raise EmptyCohort("failure table over an empty cohort")
    percentages: dict[str, float | None] = {}
    for criterion in CRITERIA:
        applicable = [o for o in outcomes if o.records[criterion].applicable]
        if not applicable:
            percentages[criterion] = None
            continue
        failed = sum(1 for o in applicable if not o.records[criterion].passed)
        percentages[criterion] = 100.0 * failed / len(applicable)
    all_failed = sum(1 for o in outcomes if not o.all_pass)
    return FailureTable(
        percentages=percentages,
        all_pct=100.0 * all_failed / len(outcomes),
        cohort_size=len(outcomes),
    )


@dataclass(frozen=True)
class DatasetRecord:
    line: int
    smiles: str
    molecule_id: str
    pchembl: float | None = None


@dataclass
class FilterRunResult:
    passing: list[tuple[str, str]]  # (molecule id, canonical SMILES)
    outcomes: list[FilterOutcome]
    table: FailureTable | None
    rejects: list[tuple[int, str, str]]  # (line, smiles, reason)
    n_records: int = 0


def largest_fragment(mol: Molecule) -> Molecule:
    """Keep the component with the most heavy atoms (ties: more atoms,
    then lowest canonical text would be overkill; first by size ordering)."""
    comps = mol.components()
    if len(comps) == 1:
        return mol
    def weight(comp: list[int]) -> tuple:
        heavy = sum(1 for i in comp if mol.atoms[i].element.atomic_number > 1)
        return (heavy, len(comp))
    best = max(comps, key=weight)
    return extract_subgraph(mol, set(best))


def process_record(
    record: DatasetRecord,
    config: FilterConfig,
    use_largest_fragment: bool = False,
    catalog: AlertCatalog | None = None,
):
    """Parse, normalize and filter one dataset record.

    Returns ``("reject", line, smiles, reason)`` for unparsable or invalid
    input, else ``("ok", outcome, canonical_smiles)``.
    """
    try:
        mol = parse_smiles(record.smiles)
    except (SmilesError, ValueError) as err:
        return ("reject", record.line, record.smiles, f"parse error: {err}")
    if use_largest_fragment and mol.multi_fragment:
        mol = largest_fragment(mol)
    report = check_validity(mol)
    if not report.valid:
        reason = "; ".join(f"atom {i}: {why}" for i, why in report.violations[:3])
        return ("reject", record.line, record.smiles, f"invalid: {reason}")
    annotations = {"pchembl": record.pchembl} if record.pchembl is not None else None
    outcome = apply_filters(
        mol, config, annotations, molecule_id=record.molecule_id, catalog=catalog
    )
    return ("ok", outcome, write_smiles(mol))


def collect_results(results: Iterable[tuple]) -> FilterRunResult:
    """Assemble a run result from per-record outputs, preserving order."""
    passing: list[tuple[str, str]] = []
    outcomes: list[FilterOutcome] = []
    rejects: list[tuple[int, str, str]] = []
    n_records = 0
    for result in results:
        n_records += 1
        if result[0] == "reject":
            rejects.append(result[1:])
            continue
        _, outcome, canonical = result
        outcomes.append(outcome)
        if outcome.all_pass:
            passing.append((outcome.molecule_id, canonical))
    table = failure_table(outcomes) if outcomes else None
    return FilterRunResult(
        passing=passing,
        outcomes=outcomes,
        table=table,
        rejects=rejects,
        n_records=n_records,
    )


def filter_dataset(
    records: Iterable[DatasetRecord],
    config: FilterConfig | None = None,
    use_largest_fragment: bool = False,
    catalog: AlertCatalog | None = None,
) -> FilterRunResult:
    """Single pass over the input; invalid molecules never reach filtering."""
    config = config or FilterConfig()
    return collect_results(
        process_record(record, config, use_largest_fragment, catalog) for record in records
    )


def load_filter_config(path) -> FilterConfig:
    """Key-value config file mirroring FilterConfig field names.

    Lines are ``name = value``; ``#`` comments; element_whitelist is a
    comma-separated symbol list; booleans accept true/false/1/0.
    """
    values: dict[str, object] = {}
    bool_names = {"ban_fused", "ban_small_aromatic", "strict_fusion", "reject_multi_fragment"}
    int_names = {"sev_max", "ring_min", "ring_max", "max_ring_size", "max_rings_gt6"}
    float_names = {"mw_min", "mw_max", "logp_min", "logp_max", "sas_max", "pchembl_min"}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected 'name = value'")
            name, _, raw = line.partition("=")
            name, raw = name.strip(), raw.strip()
            if name in bool_names:
                values[name] = raw.lower() in ("1", "true", "yes", "on")
            elif name in int_names:
                values[name] = int(raw)
            elif name in float_names:
                values[name] = float(raw)
            elif name == "element_whitelist":
                values[name] = frozenset(s.strip() for s in raw.split(",") if s.strip())
            else:
                raise ValueError(f"{path}:{line_no}: unknown option {name!r}")
    return FilterConfig(**values)


def read_dataset(path) -> Iterator[DatasetRecord]:
    """SMILES file reader: one record per line, optional tab-separated id
    and pChEMBL value; ``#`` comments; gzip transparent."""
    from .io import open_text

    with open_text(path) as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            smiles = parts[0].strip()
            molecule_id = parts[1].strip() if len(parts) > 1 and parts[1].strip() else f"line{line_no}"
            pchembl = None
            if len(parts) > 2 and parts[2].strip():
                try:
                    pchembl = float(parts[2])
                except ValueError:
                    raise ValueError(f"{path}:{line_no}: bad pChEMBL value {parts[2]!r}")
            yield DatasetRecord(
                line=line_no, smiles=smiles, molecule_id=molecule_id, pchembl=pchembl
            )
