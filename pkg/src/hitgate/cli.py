"""Command-line interface.

Subcommands: validate, filter, metrics, docking, triage, sa-table.
Every run writes a manifest.json into the output directory; all reports
reference the manifest digest and are written atomically. Exit codes:
0 success, 2 usage/missing input, 3 input parse failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .docking import (
    MalformedRow,
    TriageCandidate,
    TriageConfig,
    UnknownHeader,
    aggregate_kl,
    cohort_scores,
    load_scores,
    median_table,
    triage,
)
from .evalmetrics import (
    canonical_key_or_none,
    fit_gaussian,
    frechet_distance,
    frequency_cosine,
    internal_diversity,
    physchem_features,
    read_features_csv,
    snn,
    vun_from_keys,
)
from .fingerprints import Fingerprint, morgan_fingerprint
from .hitfilter import (
    DatasetRecord,
    FilterConfig,
    collect_results,
    load_filter_config,
    process_record,
    read_dataset,
)
from .io import atomic_write
from .manifest import RunManifest, file_digest
from .smiles import SmilesError, parse_smiles

USAGE_EXIT = 2
PARSE_EXIT = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hitgate",
        description="Hit-likeness filtering, generation metrics, docking analytics.",
    )
    parser.add_argument("--version", action="version", version=f"hitgate {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out-dir", default=".", help="report output directory")
        p.add_argument("--config", help="filter config file (key = value)")
        p.add_argument("--threads", type=int, default=1, help="worker processes")
        p.add_argument("--explain", action="store_true", help="per-molecule detail output")
        p.add_argument(
            "--largest-fragment",
            action="store_true",
            help="keep the largest fragment of multi-fragment inputs",
        )

    p = sub.add_parser("validate", help="validity / uniqueness / novelty report")
    p.add_argument("input", help="generated SMILES file (smiles[<TAB>id])")
    p.add_argument("--training", help="training-set SMILES file for novelty")
    common(p)

    p = sub.add_parser("filter", help="hit-likeness filtering + failure table")
    p.add_argument("input", help="SMILES file (smiles[<TAB>id[<TAB>pchembl]])")
    common(p)
    for flag, kind in (
        ("--sev-max", int), ("--sas-max", float), ("--mw-min", float), ("--mw-max", float),
        ("--logp-min", float), ("--logp-max", float), ("--ring-min", int), ("--ring-max", int),
        ("--max-ring-size", int), ("--max-rings-gt6", int), ("--pchembl-min", float),
    ):
        p.add_argument(flag, type=kind, default=None)

    p = sub.add_parser("metrics", help="generation metric table (one report row)")
    p.add_argument("--gen", required=True, help="generated SMILES file")
    p.add_argument("--ref", required=True, help="reference SMILES file")
    p.add_argument("--training", help="training SMILES file (novelty); defaults to --ref")
    p.add_argument("--features-gen", help="precomputed feature CSV for the generated set")
    p.add_argument("--features-ref", help="precomputed feature CSV for the reference set")
    p.add_argument(
        "--no-builtin-featurizer",
        action="store_true",
        help="skip the distribution distance when feature files are absent",
    )
    common(p)

    p = sub.add_parser("docking", help="docking-score distribution reports + plots")
    p.add_argument("scores", help="scores CSV: molecule_id,target,cohort,score")
    p.add_argument("--ref-full", default="reference-full")
    p.add_argument("--ref-hitlike", default="reference-hitlike")
    p.add_argument("--no-plots", action="store_true")
    common(p)

    p = sub.add_parser("triage", help="novelty + potency hit selection")
    p.add_argument("--candidates", required=True, help="candidate SMILES file (smiles<TAB>id)")
    p.add_argument("--binders", required=True, help="known-binder SMILES file")
    p.add_argument("--scores", required=True, help="scores CSV")
    p.add_argument("--target", help="target to triage (required with multi-target CSVs)")
    p.add_argument("--cohort", help="restrict candidate scores to one cohort")
    p.add_argument("--td-min", type=float, default=0.5)
    p.add_argument("--z", type=float, default=2.0)
    p.add_argument("--max-candidates", type=int, default=None)
    p.add_argument("--activities", help="reference activity values, one per line (plot)")
    p.add_argument("--subset-activities", help="hit-like subset activity values (plot)")
    p.add_argument("--highlight", type=float, help="candidate activity to highlight (plot)")
    common(p)

    p = sub.add_parser("sa-table", help="build a fragment score table from a corpus")
    p.add_argument("corpus", help="reference SMILES file")
    p.add_argument("-o", "--output", required=True, help="output table path")

    return parser


# -- worker functions (top level for multiprocessing pickling) -------------

_WORKER: dict = {}


def _filter_init(config: FilterConfig, largest: bool) -> None:
    _WORKER["config"] = config
    _WORKER["largest"] = largest


def _filter_one(record: DatasetRecord):
    return process_record(record, _WORKER["config"], _WORKER["largest"])


def _key_one(item: tuple[int, str]):
    position, smiles = item
    log: list = []
    key = canonical_key_or_none(smiles, log, position)
    return key, log


def _profile_one(item: tuple[int, str, str]):
    """Full per-molecule profile for the metrics command."""
    position, smiles, _molecule_id = item
    from .hitfilter import apply_filters
    from .mol import check_validity
    from .scaffolds import bemis_murcko_scaffold, fragment_molecule
    from .canon import write_smiles

    log: list = []
    try:
        mol = parse_smiles(smiles)
    except (SmilesError, ValueError) as err:
        return {"position": position, "key": None, "reason": f"parse error: {err}"}
    report = check_validity(mol)
    if not report.valid:
        reasons = "; ".join(why for _, why in report.violations[:3])
        return {"position": position, "key": None, "reason": f"invalid: {reasons}"}
    return {
        "position": position,
        "key": write_smiles(mol),
        "fp_bits": morgan_fingerprint(mol).bits,
        "scaffold": bemis_murcko_scaffold(mol).canonical_key,
        "fragments": fragment_molecule(mol).as_dict(),
        "features": physchem_features(mol),
        "filters_pass": apply_filters(mol).all_pass,
    }


def _parallel(fn, items, threads, initializer=None, initargs=()):
    items = list(items)
    if threads <= 1:
        if initializer is not None:
            initializer(*initargs)
        return [fn(item) for item in items]
    import multiprocessing

    chunk = max(1, len(items) // (threads * 4) or 1)
    with multiprocessing.Pool(threads, initializer=initializer, initargs=initargs) as pool:
        return pool.map(fn, items, chunksize=chunk)


# -- shared helpers ----------------------------------------------------------


def _require_files(subparser_usage: str, *paths) -> None:
    for path in paths:
        if path is not None and not Path(path).exists():
            raise _MissingInput(path, subparser_usage)


class _MissingInput(Exception):
    def __init__(self, path, usage):
        self.path = path
        self.usage = usage
        super().__init__(f"input not found: {path}")


def _build_config(args) -> FilterConfig:
    """Threshold precedence: flag > config file > default."""
    config = load_filter_config(args.config) if args.config else FilterConfig()
    overrides = {}
    for name in (
        "sev_max", "sas_max", "mw_min", "mw_max", "logp_min", "logp_max",
        "ring_min", "ring_max", "max_ring_size", "max_rings_gt6", "pchembl_min",
    ):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if overrides:
        from dataclasses import replace

        config = replace(config, **overrides)
    return config


def _config_snapshot(config: FilterConfig) -> dict:
    from dataclasses import asdict

    snapshot = asdict(config)
    snapshot["element_whitelist"] = sorted(snapshot["element_whitelist"])
    return snapshot


def _manifest_for(args, command: str, inputs: dict, config: dict) -> RunManifest:
    digests = {name: file_digest(path) for name, path in inputs.items() if path}
    return RunManifest(command=command, config=config, inputs=digests, version=__version__)


def _write_json(manifest: RunManifest, path: Path, payload: dict) -> None:
    payload = dict(payload)
    payload["manifest_digest"] = manifest.digest
    atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    manifest.record_output(path)


def _write_csv(manifest: RunManifest, path: Path, lines: list[str]) -> None:
    content = "\n".join(lines + [f"# manifest: {manifest.digest}"]) + "\n"
    atomic_write(path, content)
    manifest.record_output(path)


def _write_text(manifest: RunManifest, path: Path, lines: list[str]) -> None:
    atomic_write(path, "\n".join(lines) + ("\n" if lines else ""))
    manifest.record_output(path)


def _slug(text: str) -> str:
    return "".join(c if c.isalnum() else "-" for c in text).strip("-")


def _read_keys_file(path, threads: int) -> list[str | None]:
    items = [(rec.line, rec.smiles) for rec in read_dataset(path)]
    results = _parallel(_key_one, items, threads)
    return [key for key, _ in results]


# -- commands ----------------------------------------------------------------


def cmd_validate(args) -> int:
    _require_files("hitgate validate INPUT [--training FILE]", args.input, args.training)
    out_dir = Path(args.out_dir)
    records = list(read_dataset(args.input))
    items = [(rec.line, rec.smiles) for rec in records]
    results = _parallel(_key_one, items, args.threads)
    keys = [key for key, _ in results]
    rejects = [entry for _, log in results for entry in log]
    training_keys: frozenset[str] = frozenset()
    if args.training:
        training_keys = frozenset(
            k for k in _read_keys_file(args.training, args.threads) if k is not None
        )
    report = vun_from_keys(keys, training_keys)
    manifest = _manifest_for(
        args, "validate", {"input": args.input, "training": args.training}, {}
    )
    _write_json(manifest, out_dir / "vun_report.json", report.as_json_dict())
    reject_lines = [f"line {line}\t{smiles}\t{reason}" for line, smiles, reason in rejects]
    _write_text(manifest, out_dir / "rejects.log", reject_lines)
    manifest.write(out_dir / "manifest.json")
    print(f"validate: {report.n_generated} molecules, VUN {report.vun_pct:.2f}%")
    return 0


def cmd_filter(args) -> int:
    _require_files("hitgate filter INPUT", args.input, args.config)
    out_dir = Path(args.out_dir)
    config = _build_config(args)
    records = list(read_dataset(args.input))
    results = _parallel(
        _filter_one, records, args.threads,
        initializer=_filter_init, initargs=(config, args.largest_fragment),
    )
    run = collect_results(results)
    manifest = _manifest_for(args, "filter", {"input": args.input}, _config_snapshot(config))

    passing_lines = [f"{smiles}\t{mid}" for mid, smiles in run.passing]
    _write_text(manifest, out_dir / "passing.smi", passing_lines)
    if run.table is not None:
        _write_csv(manifest, out_dir / "failure_table.csv", run.table.csv_lines())
        _write_json(manifest, out_dir / "failure_table.json", run.table.as_json_dict())
    else:
        _write_csv(manifest, out_dir / "failure_table.csv", ["# empty cohort"])
        _write_json(manifest, out_dir / "failure_table.json", {"error": "empty cohort"})
    reject_lines = [f"line {line}\t{smiles}\t{reason}" for line, smiles, reason in run.rejects]
    _write_text(manifest, out_dir / "rejects.log", reject_lines)
    if args.explain:
        lines = []
        for outcome in run.outcomes:
            entry = {
                "id": outcome.molecule_id,
                "all_pass": outcome.all_pass,
                "criteria": {
                    key: {
                        "value": record.value,
                        "pass": record.passed,
                        "applicable": record.applicable,
                    }
                    for key, record in outcome.records.items()
                },
            }
            lines.append(json.dumps(entry, sort_keys=True))
        _write_text(manifest, out_dir / "outcomes.jsonl", lines)
    manifest.write(out_dir / "manifest.json")
    n_filtered = len(run.outcomes)
    print(
        f"filter: {run.n_records} records, {len(run.rejects)} rejected, "
        f"{n_filtered} filtered, {len(run.passing)} passing"
        + (f" ({100.0 * len(run.passing) / n_filtered:.2f}%)" if n_filtered else "")
    )
    return 0


def cmd_metrics(args) -> int:
    usage = "hitgate metrics --gen FILE --ref FILE"
    _require_files(usage, args.gen, args.ref, args.training,
                   args.features_gen, args.features_ref)
    out_dir = Path(args.out_dir)

    gen_records = list(read_dataset(args.gen))
    ref_records = list(read_dataset(args.ref))
    gen_items = [(r.line, r.smiles, r.molecule_id) for r in gen_records]
    ref_items = [(r.line, r.smiles, r.molecule_id) for r in ref_records]
    gen_profiles = _parallel(_profile_one, gen_items, args.threads)
    ref_profiles = _parallel(_profile_one, ref_items, args.threads)

    training_keys: frozenset[str]
    if args.training:
        training_keys = frozenset(
            k for k in _read_keys_file(args.training, args.threads) if k is not None
        )
    else:
        training_keys = frozenset(
            p["key"] for p in ref_profiles if p["key"] is not None
        )

    keys = [p["key"] for p in gen_profiles]
    report = vun_from_keys(keys, training_keys)

    # Filters % over the valid-unique-novel set (first occurrence decides).
    first_pass: dict[str, bool] = {}
    for profile in gen_profiles:
        key = profile["key"]
        if key is not None and key not in first_pass:
            first_pass[key] = profile["filters_pass"]
    vun_keys = {k for k in first_pass if k not in training_keys}
    filters_pct = (
        100.0 * sum(1 for k in vun_keys if first_pass[k]) / len(vun_keys)
        if vun_keys
        else 0.0
    )

    gen_valid = [p for p in gen_profiles if p["key"] is not None]
    ref_valid = [p for p in ref_profiles if p["key"] is not None]

    def fps(profiles):
        return [Fingerprint(bits=p["fp_bits"], width=2048, radius=2) for p in profiles]

    def counter(profiles, field):
        totals: dict[str, int] = {}
        for profile in profiles:
            if field == "scaffold":
                totals[profile["scaffold"]] = totals.get(profile["scaffold"], 0) + 1
            else:
                for key, count in profile["fragments"].items():
                    totals[key] = totals.get(key, 0) + count
        return totals

    snn_value = snn(fps(gen_valid), fps(ref_valid)) if gen_valid and ref_valid else None
    div_value = internal_diversity(fps(gen_valid)) if len(gen_valid) >= 2 else None
    frag_value = frequency_cosine(counter(gen_valid, "fragments"), counter(ref_valid, "fragments"))
    scaff_value = frequency_cosine(counter(gen_valid, "scaffold"), counter(ref_valid, "scaffold"))

    fcd_value = None
    featurizer = None
    if args.features_gen and args.features_ref:
        _, gen_matrix = read_features_csv(args.features_gen)
        _, ref_matrix = read_features_csv(args.features_ref)
        featurizer = f"file:{Path(args.features_gen).name}|{Path(args.features_ref).name}"
        fcd_value = frechet_distance(fit_gaussian(gen_matrix), fit_gaussian(ref_matrix))
    elif not args.no_builtin_featurizer:
        if len(gen_valid) >= 2 and len(ref_valid) >= 2:
            featurizer = "builtin-physchem-10d"
            fcd_value = frechet_distance(
                fit_gaussian([p["features"] for p in gen_valid]),
                fit_gaussian([p["features"] for p in ref_valid]),
            )
    else:
        print("warning: feature files absent and built-in featurizer disabled; "
              "distribution distance skipped", file=sys.stderr)

    columns = ("Valid", "VUN", "Filters", "FCD", "Frag.", "Scaff.", "SNN", "Div.")
    values = {
        "Valid": report.valid_pct,
        "VUN": report.vun_pct,
        "Filters": filters_pct,
        "FCD": fcd_value,
        "Frag.": frag_value,
        "Scaff.": scaff_value,
        "SNN": snn_value,
        "Div.": div_value,
    }
    manifest = _manifest_for(
        args,
        "metrics",
        {
            "gen": args.gen, "ref": args.ref, "training": args.training,
            "features_gen": args.features_gen, "features_ref": args.features_ref,
        },
        {"featurizer": featurizer},
    )
    payload = dict(values)
    payload["fcd_featurizer"] = featurizer
    payload["n_generated"] = report.n_generated
    payload["n_reference"] = len(ref_profiles)
    _write_json(manifest, out_dir / "metrics.json", payload)

    def cell(column):
        value = values[column]
        if value is None:
            return ""
        if column in ("Valid", "VUN", "Filters"):
            return f"{value:.2f}"
        return f"{value:.4f}"

    _write_csv(
        manifest,
        out_dir / "metrics.csv",
        [",".join(columns), ",".join(cell(c) for c in columns)],
    )
    manifest.write(out_dir / "manifest.json")
    print(
        "metrics: Valid %.2f%% VUN %.2f%% Filters %.2f%%"
        % (report.valid_pct, report.vun_pct, filters_pct)
    )
    return 0


def cmd_docking(args) -> int:
    _require_files("hitgate docking SCORES.csv", args.scores)
    out_dir = Path(args.out_dir)
    records = load_scores(args.scores)
    manifest = _manifest_for(
        args, "docking", {"scores": args.scores},
        {"ref_full": args.ref_full, "ref_hitlike": args.ref_hitlike},
    )

    by_cohort = aggregate_kl(records, args.ref_full)
    by_algorithm = aggregate_kl(records, args.ref_full, by_algorithm=True)
    kl_lines = ["cohort,kl_mean,kl_sd,n"] + [
        f"{row['group']},{row['kl_mean']:.4f},{row['kl_sd']:.4f},{row['n']}"
        for row in by_cohort
    ]
    _write_csv(manifest, out_dir / "kl_by_cohort.csv", kl_lines)
    kl_lines = ["algorithm,kl_mean,kl_sd,n"] + [
        f"{row['group']},{row['kl_mean']:.4f},{row['kl_sd']:.4f},{row['n']}"
        for row in by_algorithm
    ]
    _write_csv(manifest, out_dir / "kl_by_algorithm.csv", kl_lines)

    medians = median_table(records, args.ref_full, args.ref_hitlike)
    header = "Experiment,Target,Median (Full),Median (Hit-like),% Better (Full),% Better (Hit-like)"

    def fmt(value):
        return "" if value is None else f"{value:.2f}"

    median_lines = [header] + [
        ",".join(
            [
                str(row["Experiment"]),
                str(row["Target"]),
                fmt(row["Median (Full)"]),
                fmt(row["Median (Hit-like)"]),
                fmt(row["% Better (Full)"]),
                fmt(row["% Better (Hit-like)"]),
            ]
        )
        for row in medians
    ]
    _write_csv(manifest, out_dir / "medians_table.csv", median_lines)
    _write_json(
        manifest,
        out_dir / "docking_summary.json",
        {
            "kl_by_cohort": by_cohort,
            "kl_by_algorithm": by_algorithm,
            "median_table": medians,
            "n_records": len(records),
        },
    )

    if not args.no_plots:
        from .plots import score_histogram

        targets = sorted({r.target_id for r in records})
        cohorts = sorted(
            {r.cohort for r in records if not r.cohort.startswith("reference")}
        )
        for target in targets:
            ref = cohort_scores(records, target, args.ref_full)
            if not ref:
                continue
            for cohort in cohorts:
                gen = cohort_scores(records, target, cohort)
                if not gen:
                    continue
                path = out_dir / f"hist_{_slug(target)}_{_slug(cohort)}.svg"
                score_histogram(
                    gen, ref, cohort, args.ref_full,
                    f"{target}: {cohort} vs {args.ref_full}",
                    path, manifest.digest,
                )
                manifest.record_output(path)
    manifest.write(out_dir / "manifest.json")
    print(f"docking: {len(records)} records, {len(medians)} median rows")
    return 0


def cmd_triage(args) -> int:
    usage = "hitgate triage --candidates FILE --binders FILE --scores FILE"
    _require_files(usage, args.candidates, args.binders, args.scores,
                   args.activities, args.subset_activities)
    out_dir = Path(args.out_dir)
    records = load_scores(args.scores)
    targets = sorted({r.target_id for r in records})
    target = args.target
    if target is None:
        if len(targets) > 1:
            print(
                f"error: scores cover {len(targets)} targets; pass --target",
                file=sys.stderr,
            )
            return USAGE_EXIT
        target = targets[0] if targets else ""

    score_by_id: dict[str, float] = {}
    for record in records:
        if record.target_id != target:
            continue
        if args.cohort and record.cohort != args.cohort:
            continue
        current = score_by_id.get(record.molecule_id)
        if current is None or record.score < current:
            score_by_id[record.molecule_id] = record.score

    from .sascore import sa_score

    candidates = []
    skipped = []
    for rec in read_dataset(args.candidates):
        if rec.molecule_id not in score_by_id:
            skipped.append((rec.molecule_id, "no docking score"))
            continue
        try:
            mol = parse_smiles(rec.smiles)
        except (SmilesError, ValueError) as err:
            skipped.append((rec.molecule_id, f"parse error: {err}"))
            continue
        candidates.append(
            TriageCandidate(
                molecule_id=rec.molecule_id,
                fingerprint=morgan_fingerprint(mol),
                score=score_by_id[rec.molecule_id],
                sa_score=sa_score(mol),
            )
        )
    binders = []
    for rec in read_dataset(args.binders):
        try:
            mol = parse_smiles(rec.smiles)
        except (SmilesError, ValueError) as err:
            skipped.append((rec.molecule_id, f"binder parse error: {err}"))
            continue
        binders.append((rec.molecule_id, morgan_fingerprint(mol)))

    config = TriageConfig(td_min=args.td_min, z=args.z, max_candidates=args.max_candidates)
    hits = triage(candidates, binders, config) if candidates else []

    manifest = _manifest_for(
        args, "triage",
        {"candidates": args.candidates, "binders": args.binders, "scores": args.scores},
        {"target": target, "td_min": args.td_min, "z": args.z},
    )
    lines = ["id,score,z_margin,nearest_binder_id,tanimoto_distance,sa_score"]
    for hit in hits:
        sa_cell = "" if hit.sa_score is None else f"{hit.sa_score:.2f}"
        lines.append(
            f"{hit.molecule_id},{hit.score:.2f},{hit.z_margin:.2f},"
            f"{hit.nearest_binder_id},{hit.tanimoto_distance:.4f},{sa_cell}"
        )
    _write_csv(manifest, out_dir / "triage.csv", lines)
    if skipped:
        _write_text(
            manifest,
            out_dir / "triage_skipped.log",
            [f"{mid}\t{reason}" for mid, reason in skipped],
        )

    if args.activities:
        from .plots import activity_violin

        def read_values(path):
            values = []
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line and not line.startswith("#"):
                        values.append(float(line))
            return values

        reference = read_values(args.activities)
        subset = read_values(args.subset_activities) if args.subset_activities else []
        path = out_dir / "triage_activity.svg"
        activity_violin(
            reference, subset, args.highlight,
            f"{target}: candidate vs known activity", path, manifest.digest,
        )
        manifest.record_output(path)
    manifest.write(out_dir / "manifest.json")
    print(f"triage: {len(candidates)} scored candidates, {len(hits)} hits")
    return 0


def cmd_sa_table(args) -> int:
    _require_files("hitgate sa-table CORPUS -o OUT", args.corpus)
    from .sascore import build_fragment_table, write_fragment_table

    molecules = []
    for rec in read_dataset(args.corpus):
        try:
            molecules.append(parse_smiles(rec.smiles))
        except (SmilesError, ValueError):
            continue
    table = build_fragment_table(molecules)
    write_fragment_table(table, args.output)
    print(f"sa-table: {len(molecules)} molecules, {len(table)} environments")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "validate": cmd_validate,
        "filter": cmd_filter,
        "metrics": cmd_metrics,
        "docking": cmd_docking,
        "triage": cmd_triage,
        "sa-table": cmd_sa_table,
    }
    try:
        return handlers[args.command](args)
    except _MissingInput as err:
        print(f"usage: {err.usage}", file=sys.stderr)
        print(f"error: {err}", file=sys.stderr)
        return USAGE_EXIT
    except (UnknownHeader, MalformedRow) as err:
        print(f"error: {err}", file=sys.stderr)
        return PARSE_EXIT
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return PARSE_EXIT


if __name__ == "__main__":
    sys.exit(main())
