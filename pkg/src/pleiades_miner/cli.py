"""Umbrella command line interface.

Subcommands mirror the pipeline stages: ingest, quantify, rank, search,
predict, correlate, profile, riskmap, reproduce. Every subcommand takes
the shared flags --jobs, --seed and --log-level, writes deterministic
output files (stable key order, no timestamps), and exits nonzero on
failure.
"""

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .bundle import bundle_risk, load_bundle
from .correlation import (BANDS, band_label, benjamini_hochberg, bonferroni,
                          links_above, mutual_pairs, pcc_matrix,
                          pcc_permutation_p, rig_matrix, symmetric_rig_pairs,
                          usage_matrix)
from .datasets import (ATTRIBUTE_COLUMNS, BASES, NOMINAL_COLUMNS, PLEIADES,
                       TARGET_DRUGS, load_table, screen_overclaimers,
                       usage_counts)
from .datasets import user_vector
from .profiles import (FACTORS, arrow, group_stats, moderate_code,
                       sample_t_scores)
from .quantify import dummy_code, quantify_table
from .ranking import (double_kaiser_ranking, principal_variables,
                      sparse_component_elimination)
from .reproduce import TABLES, run_reproduce
from .riskmap import risk_map, write_risk_map
from .search import load_space, run_search

log = logging.getLogger("pleiades_miner")


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(c) for c in row) + "\n")


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _cmd_ingest(args):
    table = load_table(args.input)
    n_loaded = table.n_rows
    excluded = 0
    if args.screen:
        table, excluded = screen_overclaimers(table)
    if args.mode == "quantified":
        table.attribute_matrix()  # fail fast on non-numeric cells
    if args.clean_out:
        table.write(args.clean_out)
    rows = [(drug, basis, count, f"{percent:.2f}")
            for drug, basis, count, percent in usage_counts(table)
            if basis == args.basis]
    _write_csv(args.summary, ("drug", "basis", "count", "percent"), rows)
    print(f"{n_loaded} rows loaded, {excluded} over-claimers removed, "
          f"{len(rows)} drug counts at basis {args.basis} -> {args.summary}")
    return 0


def _cmd_quantify(args):
    table = load_table(args.input)
    header, rows, mappings = quantify_table(table, nominal_mode=args.nominal)
    _write_csv(args.out, header, rows)
    mapping_path = args.mapping or os.path.splitext(args.out)[0] + ".mapping.csv"
    _write_csv(mapping_path, ("column", "category", "value", "note"),
               [(m["column"], m["category"], m["value"], m["note"])
                for m in mappings])
    print(f"{len(rows)} rows quantified ({args.nominal} nominal coding) -> "
          f"{args.out}; category mapping -> {mapping_path}")
    return 0


def _expanded_matrix(table, expand):
    """Attribute matrix with selected columns replaced by indicators."""
    expand = [c.strip() for c in expand.split(",") if c.strip()]
    unknown = [c for c in expand if c not in ATTRIBUTE_COLUMNS]
    if unknown:
        raise SystemExit(f"--expand names unknown columns: {unknown}")
    blocks, tokens = [], []
    for col in ATTRIBUTE_COLUMNS:
        if col in expand:
            mat, cats = dummy_code(table.column(col))
            blocks.append(mat)
            tokens.extend(f"{col}={cat}" for cat in cats)
        else:
            blocks.append(table.attribute_matrix([col]))
            tokens.append(col)
    return np.hstack(blocks), tokens


def _cmd_rank(args):
    table = load_table(args.input)
    if args.expand:
        X, tokens = _expanded_matrix(table, args.expand)
    else:
        X, tokens = table.attribute_matrix(), list(ATTRIBUTE_COLUMNS)
    report = {"method": args.method, "features": tokens}
    if args.method == "pv":
        ranked = principal_variables(X)
        report["order"] = [tokens[r.index] for r in ranked]
        report["fve"] = [r.fve for r in ranked]
        report["cfve"] = [r.cfve for r in ranked]
        report["constant"] = [tokens[r.index] for r in ranked if r.constant]
    elif args.method == "dk":
        res = double_kaiser_ranking(X)
        report["ranking"] = [tokens[j] for j in res.ranking]
        report["removed"] = [tokens[j] for j in res.removed]
        report["importances"] = {tokens[j]: res.importances[j]
                                 for j in sorted(res.importances)}
    else:
        res = sparse_component_elimination(X)
        report["waves"] = [[tokens[j] for j in wave] for wave in res.waves]
        report["kept"] = [tokens[j] for j in res.kept]
        report["components"] = [[float(v) for v in comp]
                                for comp in res.components]
    _write_json(args.out, report)
    print(f"{args.method} ranking of {len(tokens)} features -> {args.out}")
    return 0


def _cmd_search(args):
    table = load_table(args.input)
    space = load_space(args.space)
    out = os.path.abspath(args.out)
    out_dir = os.path.dirname(out) or "."
    os.makedirs(out_dir, exist_ok=True)
    summary = run_search(table, args.drug, args.basis, space, out_dir,
                         jobs=args.jobs, seed=args.seed, budget=args.budget)
    if os.path.basename(out) != "leaderboard.csv":
        os.replace(os.path.join(out_dir, "leaderboard.csv"), out)
    best = summary.get("best")
    if best is None:
        print(f"{summary['n_evaluated']} configurations evaluated; "
              "no admissible configuration found")
        return 1
    print(f"{summary['n_evaluated']} configurations evaluated -> {out}")
    print(f"best: {best['method']} features={';'.join(best['features'])} "
          f"weight={best['weight']} sens={best['sens']} spec={best['spec']} "
          f"(bundle: {os.path.join(out_dir, 'best.json')})")
    return 0


def _cmd_predict(args):
    bundle = load_bundle(args.model)
    features = bundle["features"]
    with open(args.input, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in features if c not in (reader.fieldnames or ())]
        if missing:
            raise SystemExit(
                f"input lacks the model's feature columns: {missing}")
        has_id = "id" in (reader.fieldnames or ())
        ids, rows = [], []
        for i, rec in enumerate(reader):
            ids.append(rec["id"] if has_id else str(i))
            rows.append([float(rec[c]) for c in features])
    if not rows:
        raise SystemExit("input has no data rows")
    risks = bundle_risk(bundle, np.asarray(rows, dtype=np.float64))
    _write_csv(args.out, ("id", "risk"),
               [(rid, repr(float(r))) for rid, r in zip(ids, risks)])
    print(f"{len(rows)} rows scored with {bundle['method']} "
          f"({';'.join(features)}) -> {args.out}")
    return 0


def _cmd_correlate(args):
    table = load_table(args.input)
    B = usage_matrix(table, args.basis)
    R, P = pcc_matrix(B)
    m = len(TARGET_DRUGS)
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    p_flat = np.array([P[i, j] for i, j in pairs])
    bonf = bonferroni(p_flat, alpha=args.alpha)
    bh = benjamini_hochberg(p_flat, q=args.fdr)
    RIG = rig_matrix(B)
    report = {
        "basis": args.basis,
        "n_rows": int(B.shape[0]),
        "drugs": list(TARGET_DRUGS),
        "alpha": args.alpha,
        "fdr_q": args.fdr,
        "n_pairs": len(pairs),
        "bonferroni_significant": int(bonf.sum()),
        "bh_significant": int(bh.sum()),
        "bonferroni_pairs": [
            [TARGET_DRUGS[i], TARGET_DRUGS[j]]
            for (i, j), keep in zip(pairs, bonf) if keep],
        "bh_pairs": [
            [TARGET_DRUGS[i], TARGET_DRUGS[j]]
            for (i, j), keep in zip(pairs, bh) if keep],
        "pcc": [[float(v) for v in row] for row in R],
        "pvalues": [[float(v) for v in row] for row in P],
        "rig": [[float(v) for v in row] for row in RIG],
        "mutual_rig_pairs": [
            [TARGET_DRUGS[i], TARGET_DRUGS[j]]
            for i, j in mutual_pairs(RIG)],
        "symmetric_rig_pairs": [
            [TARGET_DRUGS[i], TARGET_DRUGS[j]]
            for i, j in symmetric_rig_pairs(RIG)],
    }
    if args.permutation:
        perm = {}
        for i, j in pairs:
            key = f"{TARGET_DRUGS[i]}/{TARGET_DRUGS[j]}"
            perm[key] = pcc_permutation_p(
                B[:, i], B[:, j], n_permutations=args.permutation,
                seed=args.seed)
        report["permutation_pvalues"] = perm
    _write_json(args.out, report)
    if args.edges:
        threshold = args.threshold
        if threshold is None:
            threshold = BANDS[args.basis][0]
        edges = links_above(R, TARGET_DRUGS, threshold)
        edges.sort(key=lambda e: (-e[2], e[0], e[1]))
        _write_csv(args.edges, ("drug_a", "drug_b", "r", "band"),
                   [(a, b, f"{r:.3f}", band_label(r, args.basis))
                    for a, b, r in edges])
        print(f"{len(edges)} edges at |r| >= {threshold} -> {args.edges}")
    print(f"{args.basis} basis: {int(bonf.sum())} Bonferroni and "
          f"{int(bh.sum())} BH significant pairs of {len(pairs)} -> {args.out}")
    return 0


def _cmd_profile(args):
    table = load_table(args.input)
    T = sample_t_scores(table.attribute_matrix(list(FACTORS)))
    targets = list(TARGET_DRUGS) + list(PLEIADES)
    report = {"basis": args.basis, "alpha": args.alpha,
              "welch": not args.pooled, "factors": list(FACTORS),
              "targets": {}}
    arrow_rows = []
    for target in targets:
        y = user_vector(table, target, args.basis)
        n_users = int(y.sum())
        n_non = int(y.size - n_users)
        if n_users < 2 or n_non < 2:
            report["targets"][target] = {
                "n_users": n_users, "n_nonusers": n_non,
                "skipped": "needs at least two rows per group"}
            arrow_rows.append([target] + [""] * len(FACTORS))
            continue
        stats = group_stats(T, y, welch=not args.pooled)
        codes, arrows, factors = [], [], []
        for g in stats:
            code, in_band = moderate_code(g["user_mean"])
            codes.append(code if in_band else code + "!")
            arrows.append(arrow(g["p"], g["user_mean"], g["nonuser_mean"],
                                alpha=args.alpha))
            factors.append({k: (float(v) if isinstance(v, float) else v)
                            for k, v in g.items()})
        report["targets"][target] = {
            "n_users": n_users, "n_nonusers": n_non,
            "moderate_codes": codes, "arrows": arrows,
            "stats": factors}
        arrow_rows.append([target] + arrows)
    _write_json(args.out, report)
    if args.arrows:
        _write_csv(args.arrows, ("target", "n", "e", "o", "a", "c"),
                   arrow_rows)
        print(f"arrow table -> {args.arrows}")
    print(f"{len(targets)} targets profiled at basis {args.basis} -> "
          f"{args.out}")
    return 0


def _cmd_riskmap(args):
    bundle = load_bundle(args.model)
    result = risk_map(bundle, args.x, args.y, slice_feature=args.slice,
                      grid=args.grid)
    paths = write_risk_map(result, args.out)
    print(f"{args.grid}x{args.grid} risk map over ({args.x}, {args.y})"
          + (f" sliced by {args.slice}" if args.slice else ""))
    for p in paths:
        print(f"  {p}")
    return 0


def _cmd_reproduce(args):
    tables = None
    if args.tables:
        tables = [t.strip() for t in args.tables.split(",") if t.strip()]
    cells, summary, code = run_reproduce(
        tables=tables, data_path=args.data, raw_path=args.raw,
        out_dir=args.out, jobs=args.jobs, seed=args.seed)
    for t in summary["skipped_missing_input"]:
        print(f"{t}: SKIPPED (missing input file)")
    for t, s in summary["tables"].items():
        status = "PASS" if s["passed"] else "FAIL"
        print(f"{t}: {s['ok']}/{s['cells']} cells ok - {status}")
    if args.out:
        print(f"cell-level report -> "
              f"{os.path.join(args.out, 'reproduce_report.csv')}")
    return code


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pleiades-miner",
        description="Drug-consumption risk mining: quantification, feature "
                    "ranking, exhaustive LOOCV classifier search, usage "
                    "correlation analysis, personality profiles, risk maps "
                    "and published-table reproduction.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--jobs", type=int, default=None,
                        help="worker processes (default: all cores)")
    common.add_argument("--seed", type=int, default=0,
                        help="base random seed (default 0)")
    common.add_argument("--log-level", default="WARNING",
                        help="logging level (default WARNING)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common],
                       help="load a survey table and emit per-drug user counts")
    p.add_argument("--input", required=True, help="survey CSV")
    p.add_argument("--mode", choices=("raw", "quantified"),
                   default="quantified",
                   help="whether attribute cells are raw codes or reals")
    p.add_argument("--basis", choices=tuple(BASES), default="decade")
    p.add_argument("--summary", required=True, help="output counts CSV")
    p.add_argument("--screen", action="store_true",
                   help="drop rows claiming use of the control substance")
    p.add_argument("--clean-out", help="also write the loaded table here")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("quantify", parents=[common],
                       help="map categorical attributes to real values")
    p.add_argument("--input", required=True, help="raw-coded survey CSV")
    p.add_argument("--out", required=True, help="quantified CSV")
    p.add_argument("--nominal", choices=("catpca", "dummy"),
                   default="catpca", help="nominal attribute coding")
    p.add_argument("--mapping",
                   help="sidecar category-mapping CSV "
                        "(default: <out>.mapping.csv)")
    p.set_defaults(func=_cmd_quantify)

    p = sub.add_parser("rank", parents=[common],
                       help="rank input features")
    p.add_argument("--input", required=True, help="quantified CSV")
    p.add_argument("--method", required=True, choices=("pv", "dk", "spca"),
                   help="pv=principal variables, dk=double Kaiser, "
                        "spca=sparse component elimination")
    p.add_argument("--out", required=True, help="output report JSON")
    p.add_argument("--expand",
                   help="comma-separated attribute columns to replace with "
                        "indicator columns first (e.g. country,ethnicity)")
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("search", parents=[common],
                       help="exhaustive LOOCV classifier search")
    p.add_argument("--input", required=True, help="quantified CSV")
    p.add_argument("--drug", required=True,
                   help="target drug or pleiad (e.g. ecstasy, benzoPl)")
    p.add_argument("--basis", choices=tuple(BASES), default="decade")
    p.add_argument("--space", required=True, help="search-space JSON file")
    p.add_argument("--out", required=True,
                   help="leaderboard CSV (best.json and search_meta.json "
                        "are written next to it)")
    p.add_argument("--budget", type=int, default=None,
                   help="evaluate only the first N configurations")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("predict", parents=[common],
                       help="score rows with a saved model bundle")
    p.add_argument("--model", required=True, help="model bundle JSON")
    p.add_argument("--input", required=True,
                   help="CSV containing the model's feature columns")
    p.add_argument("--out", required=True, help="output risks CSV")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("correlate", parents=[common],
                       help="usage correlation and information-gain analysis")
    p.add_argument("--input", required=True, help="survey CSV")
    p.add_argument("--basis", choices=tuple(BASES), default="decade")
    p.add_argument("--out", required=True, help="output report JSON")
    p.add_argument("--edges", help="also write a banded edge list CSV")
    p.add_argument("--threshold", type=float, default=None,
                   help="edge display threshold "
                        "(default: the basis' first band edge)")
    p.add_argument("--alpha", type=float, default=0.001,
                   help="family-wise level for the conservative correction")
    p.add_argument("--fdr", type=float, default=0.01,
                   help="false-discovery-rate level for the step-up "
                        "correction")
    p.add_argument("--permutation", type=int, default=0,
                   help="additionally estimate p-values with N permutations")
    p.set_defaults(func=_cmd_correlate)

    p = sub.add_parser("profile", parents=[common],
                       help="user vs non-user personality statistics")
    p.add_argument("--input", required=True, help="survey CSV")
    p.add_argument("--basis", choices=tuple(BASES), default="decade")
    p.add_argument("--out", required=True, help="output profiles JSON")
    p.add_argument("--arrows", help="also write the significance-arrow CSV")
    p.add_argument("--alpha", type=float, default=0.01,
                   help="significance level for arrows")
    p.add_argument("--pooled", action="store_true",
                   help="pooled-variance t-test instead of the unequal-"
                        "variance default")
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("riskmap", parents=[common],
                       help="risk surface of a saved model over two features")
    p.add_argument("--model", required=True, help="model bundle JSON")
    p.add_argument("--x", required=True, help="feature on the x axis")
    p.add_argument("--y", required=True, help="feature on the y axis")
    p.add_argument("--slice",
                   help="categorical feature to hold per-category")
    p.add_argument("--grid", type=int, default=200,
                   help="grid resolution per axis (default 200)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_riskmap)

    p = sub.add_parser("reproduce", parents=[common],
                       help="recompute published reference tables and diff")
    p.add_argument("--tables",
                   help=f"comma-separated table ids (default: all of "
                        f"{','.join(TABLES)})")
    p.add_argument("--data", help="quantified public survey CSV")
    p.add_argument("--raw", help="raw factor-score CSV (id,nscore..cscore)")
    p.add_argument("--out", help="output directory for the diff report")
    p.set_defaults(func=_cmd_reproduce)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s")
    try:
        code = args.func(args)
    except (ValueError, OSError) as exc:
        parser.exit(2, f"pleiades-miner {args.command}: {exc}\n")
    sys.exit(code or 0)


if __name__ == "__main__":
    main()
