"""Command-line entry point.

Every subcommand reads files, writes its artifacts atomically, and prints a
one-object JSON summary to stdout. Artifacts embed (directly for JSON, via a
`<name>.meta.json` sidecar for CSV and binary outputs) the full configuration
and SHA-256 digests of their inputs, so a result can always be traced back to
its exact inputs. All randomness flows from --seed. Exit codes: 0 success,
1 domain error, 2 usage error.

Environment overrides: SYNDIFF_SEED, SYNDIFF_JOBS, SYNDIFF_EPS,
SYNDIFF_MAX_ITER take effect when the corresponding flag is not given.
"""

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import analysis, embeddings, otdd, probe, regress, treebank, typology
from .errors import SyndiffError
from ._util import sha256_file, write_text_atomic, write_bytes_atomic


def _env(name, default):
    return os.environ.get(f"SYNDIFF_{name}", default)


def _dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _read_text(path):
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def _digests(paths):
    return {os.path.basename(p): sha256_file(p) for p in sorted(set(paths))}


def _write_csv_artifact(path, text, meta):
    write_text_atomic(path, text)
    write_text_atomic(path + ".meta.json", _dumps(meta))
    return [path, path + ".meta.json"]


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def cmd_parse_treebank(args):
    tb = treebank.parse_conllu(_read_text(args.input), language=args.language)
    instances, rejects = treebank.extract_relations(tb, strip_subtypes=not args.keep_subtypes)
    write_text_atomic(args.output, treebank.relations_tsv(instances))
    summary = treebank.treebank_summary(tb, instances)
    summary["rejected"] = len(rejects)
    summary["inputs"] = _digests([args.input])
    outputs = [args.output]
    if args.summary:
        write_text_atomic(args.summary, _dumps(summary))
        outputs.append(args.summary)
    return {"command": "parse-treebank", "outputs": outputs, "summary": summary}


def cmd_validate(args):
    problems = []
    checked = 0

    def check(path, loader):
        nonlocal checked
        checked += 1
        try:
            loader(path)
        except (SyndiffError, OSError, ValueError) as exc:
            problems.append({"file": path, "problem": str(exc)})

    for path in args.ldeb or []:
        check(path, embeddings.read_embedding_file)
    for path in args.ldds or []:
        check(path, embeddings.load_dataset)
    if args.wals:
        check(args.wals, lambda p: typology.load_wals_csv(_read_text(p)))
    if args.params:
        check(args.params, lambda p: typology.load_parameters_csv(_read_text(p)))
    if args.las:
        check(args.las, lambda p: analysis.TransferTable.from_csv(_read_text(p)))
    if args.matrix:
        check(args.matrix, lambda p: analysis.DistanceMatrix.from_csv(_read_text(p)))
    return {
        "command": "validate",
        "checked": checked,
        "problems": problems,
        "exit_code": 1 if problems else 0,
    }


def cmd_build_dataset(args):
    tb = treebank.parse_conllu(_read_text(args.treebank), language=args.language)
    es = embeddings.read_embedding_file(args.embeddings)
    ds = embeddings.assemble_dataset(
        tb,
        es,
        max_items=args.max_items,
        per_label_min=args.per_label_min,
        seed=args.seed,
        strip_subtypes=not args.keep_subtypes,
    )
    ds.metadata["inputs"] = _digests([args.treebank, args.embeddings])
    write_bytes_atomic(args.output, embeddings.encode_dataset(ds))
    return {
        "command": "build-dataset",
        "outputs": [args.output],
        "language": ds.language,
        "items": len(ds),
        "labels": len(ds.label_set),
        "metadata": ds.metadata,
    }


def _otdd_config(args):
    return otdd.OtddConfig(
        p=args.p,
        eps=args.eps,
        max_iter=args.max_iter,
        marginal_tol=args.marginal_tol,
        label_mode=args.label_mode,
        cost_mode=args.cost_mode,
    )


def cmd_otdd(args):
    cfg = _otdd_config(args)
    a = embeddings.load_dataset(args.a)
    b = embeddings.load_dataset(args.b)
    result = otdd.dataset_distance(a, b, cfg, jobs=args.jobs)
    payload = otdd.result_to_json(result)
    payload["inputs"] = _digests([args.a, args.b])
    write_text_atomic(args.output, _dumps(payload))
    return {
        "command": "otdd",
        "outputs": [args.output],
        "language_a": result.language_a,
        "language_b": result.language_b,
        "distance": result.distance,
        "converged": result.converged,
    }


def cmd_distance_matrix(args):
    cfg = _otdd_config(args)
    datasets = [embeddings.load_dataset(p) for p in args.datasets]
    codes = [ds.language for ds in datasets]
    if len(set(codes)) != len(codes):
        raise SyndiffError(f"duplicate languages among datasets: {codes}")
    order = np.argsort(codes)
    datasets = [datasets[i] for i in order]
    codes = [codes[i] for i in order]
    n = len(datasets)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def solve(pair):
        i, j = pair
        return otdd.dataset_distance(datasets[i], datasets[j], cfg)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(solve, pairs))
    else:
        results = [solve(p) for p in pairs]

    values = np.zeros((n, n))
    converged = True
    for (i, j), res in zip(pairs, results):
        values[i, j] = values[j, i] = res.distance
        converged = converged and res.converged
    matrix = analysis.DistanceMatrix(codes=tuple(codes), values=values)
    meta = {
        "measure": "otdd",
        "config": otdd.result_to_json(results[0])["config"] if results else {},
        "converged": converged,
        "inputs": _digests(args.datasets),
        "languages": codes,
    }
    outputs = _write_csv_artifact(args.output, matrix.to_csv(), meta)
    return {
        "command": "distance-matrix",
        "outputs": outputs,
        "languages": codes,
        "pairs": len(pairs),
        "converged": converged,
    }


def cmd_probe(args):
    train = embeddings.load_dataset(args.train)
    eval_ds = embeddings.load_dataset(args.eval)
    sched = {"max_epochs": args.max_epochs, "patience": args.patience, "seed": args.seed}
    outputs = []
    if args.l2 is not None:
        model = probe.train_probe(train, l2=args.l2, **sched)
        accuracy = probe.probe_accuracy(model, eval_ds)
        payload = {
            "language": train.language,
            "layer": train.layer,
            "l2": args.l2,
            "accuracy": accuracy,
            "inputs": _digests([args.train, args.eval]),
        }
        if args.model_output:
            write_text_atomic(args.model_output, model.to_json())
            outputs.append(args.model_output)
    else:
        strengths = [float(s) for s in args.strengths.split(",")] if args.strengths else probe.DEFAULT_STRENGTHS
        report = probe.probe_sweep(train, eval_ds, strengths=strengths, **sched)
        payload = {
            "language": train.language,
            "layer": train.layer,
            "strengths": list(report.strengths),
            "accuracies": list(report.accuracies),
            "mean_accuracy": report.mean_accuracy,
            "ci95": [report.ci_low, report.ci_high],
            "inputs": _digests([args.train, args.eval]),
        }
    write_text_atomic(args.output, _dumps(payload))
    outputs.insert(0, args.output)
    summary = {"command": "probe", "outputs": outputs}
    summary.update({k: payload[k] for k in payload if k not in ("inputs",)})
    return summary


def cmd_formal_dist(args):
    profiles = typology.load_parameters_csv(_read_text(args.params))
    codes = sorted(profiles)
    values = np.zeros((len(codes), len(codes)))
    for i, la in enumerate(codes):
        for j in range(i + 1, len(codes)):
            d = typology.jaccard_distance(profiles[la], profiles[codes[j]])
            values[i, j] = values[j, i] = d
    matrix = analysis.DistanceMatrix(codes=tuple(codes), values=values)
    meta = {"measure": "jaccard-formal", "inputs": _digests([args.params]), "languages": codes}
    outputs = _write_csv_artifact(args.output, matrix.to_csv(), meta)
    return {"command": "formal-dist", "outputs": outputs, "languages": codes}


def _load_feature_list(path):
    if not path:
        return typology.DEFAULT_FEATURES
    return tuple(line.strip() for line in _read_text(path).splitlines() if line.strip())


def cmd_wals_dist(args):
    profiles = typology.load_wals_csv(_read_text(args.wals))
    features = _load_feature_list(args.features)
    pairs_csv = typology.feature_pairs_csv(profiles, features)
    meta = {
        "measure": "wals-cosine",
        "features": len(features),
        "inputs": _digests([args.wals] + ([args.features] if args.features else [])),
        "languages": sorted(profiles),
    }
    outputs = _write_csv_artifact(args.output, pairs_csv, meta)
    if args.average_output:
        codes = sorted(profiles)
        values = np.zeros((len(codes), len(codes)))
        for i, la in enumerate(codes):
            for j in range(i + 1, len(codes)):
                v = typology.feature_distance_vector(
                    profiles[la], profiles[codes[j]], features, imputation="none"
                )
                values[i, j] = values[j, i] = typology.average_feature_distance(v)
        matrix = analysis.DistanceMatrix(codes=tuple(codes), values=values)
        avg_meta = dict(meta)
        avg_meta["measure"] = "wals-average"
        outputs += _write_csv_artifact(args.average_output, matrix.to_csv(), avg_meta)
    return {
        "command": "wals-dist",
        "outputs": outputs,
        "languages": sorted(profiles),
        "features": len(features),
    }


def cmd_correlate(args):
    a = analysis.DistanceMatrix.from_csv(_read_text(args.a))
    b = analysis.DistanceMatrix.from_csv(_read_text(args.b))
    comparison = analysis.compare_measures(a, b, row=args.row)
    payload = {
        "rho": comparison.rho,
        "p_value": comparison.p_value,
        "n_pairs": comparison.n_pairs,
        "row": args.row,
        "inputs": _digests([args.a, args.b]),
    }
    write_text_atomic(args.output, _dumps(payload))
    outputs = [args.output]
    if args.scatter:
        write_text_atomic(args.scatter, analysis.scatter_csv(comparison))
        outputs.append(args.scatter)
    return {
        "command": "correlate",
        "outputs": outputs,
        "rho": comparison.rho,
        "p_value": comparison.p_value,
        "n_pairs": comparison.n_pairs,
    }


def cmd_cluster(args):
    matrix = analysis.DistanceMatrix.from_csv(_read_text(args.matrix))
    tree = analysis.agglomerative_cluster(matrix, linkage=args.linkage)
    write_text_atomic(args.output, tree.newick() + "\n")
    meta = {
        "linkage": args.linkage,
        "inputs": _digests([args.matrix]),
        "merges": [
            {"a": list(a), "b": list(b), "height": h} for a, b, h in tree.merges
        ],
    }
    write_text_atomic(args.output + ".meta.json", _dumps(meta))
    return {
        "command": "cluster",
        "outputs": [args.output, args.output + ".meta.json"],
        "linkage": args.linkage,
        "languages": list(matrix.codes),
    }


def cmd_drop(args):
    table = analysis.TransferTable.from_csv(_read_text(args.las))
    drop = analysis.las_drop(table)
    # drops can be negative (transfer beats in-language), so this is a plain
    # CSV rather than a TransferTable
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["source", *table.codes])
    for code, row in zip(table.codes, drop):
        writer.writerow([code, *[repr(float(v)) for v in row]])
    meta = {"measure": "las-drop", "inputs": _digests([args.las])}
    outputs = _write_csv_artifact(args.output, buf.getvalue(), meta)
    return {"command": "drop", "outputs": outputs, "languages": list(table.codes)}


def _load_training_rows(features_path, targets_path):
    pairs, feature_ids, X = typology.load_feature_pairs_csv(_read_text(features_path))
    matrix = analysis.DistanceMatrix.from_csv(_read_text(targets_path))
    missing = [p for p in pairs if p[0] not in matrix.codes or p[1] not in matrix.codes]
    if missing:
        raise SyndiffError(f"target matrix lacks languages for pairs: {missing[:5]}")
    y = np.asarray([matrix.lookup(a, b) for a, b in pairs])
    return pairs, feature_ids, X, y


def _mean_table(feature_ids, X):
    table = {}
    for col, fid in enumerate(feature_ids):
        defined = X[:, col][~np.isnan(X[:, col])]
        table[fid] = float(defined.mean()) if len(defined) else 0.5
    return table


def _imputation_spec(mode, feature_ids, X):
    if mode == "sentinel":
        return {"mode": "sentinel"}
    return {"mode": "mean", "table": _mean_table(feature_ids, X)}


def _gbdt_params(args):
    return {
        "n_estimators": args.n_estimators,
        "max_depth": args.max_depth,
        "learning_rate": args.learning_rate,
        "min_samples_leaf": args.min_samples_leaf,
    }


def cmd_train_regressor(args):
    pairs, feature_ids, X, y = _load_training_rows(args.features, args.targets)
    imputation = _imputation_spec(args.imputation, feature_ids, X)
    model = regress.fit_gbdt(
        X, y, feature_ids=feature_ids, imputation=imputation, **_gbdt_params(args)
    )
    write_text_atomic(args.output, model.to_json())
    meta = {
        "pairs": len(pairs),
        "features": len(feature_ids),
        "imputation": args.imputation,
        "gbdt": _gbdt_params(args),
        "inputs": _digests([args.features, args.targets]),
        "final_train_mse": model.train_mse[-1],
    }
    write_text_atomic(args.output + ".meta.json", _dumps(meta))
    return {
        "command": "train-regressor",
        "outputs": [args.output, args.output + ".meta.json"],
        "pairs": len(pairs),
        "final_train_mse": model.train_mse[-1],
    }


def cmd_cross_validate(args):
    pairs, feature_ids, X, y = _load_training_rows(args.features, args.targets)
    imputation = _imputation_spec(args.imputation, feature_ids, X)
    fit_params = dict(feature_ids=feature_ids, imputation=imputation, **_gbdt_params(args))
    if args.mode == "language":
        scores = regress.cross_validate_leave_one_language_out(X, y, pairs, **fit_params)
        defined = [v for v in scores.values() if v is not None]
        payload = {
            "mode": "language",
            "r2_per_language": scores,
            "r2_mean": float(np.mean(defined)) if defined else None,
        }
    else:
        result = regress.cross_validate(X, y, k=args.k, seed=args.seed, **fit_params)
        payload = {
            "mode": "pairs",
            "k": args.k,
            "r2_per_fold": list(result.r2_per_fold),
            "r2_mean": result.r2_mean,
        }
    payload["inputs"] = _digests([args.features, args.targets])
    payload["gbdt"] = _gbdt_params(args)
    write_text_atomic(args.output, _dumps(payload))
    return {
        "command": "cross-validate",
        "outputs": [args.output],
        "r2_mean": payload["r2_mean"],
        "mode": payload["mode"],
    }


def cmd_importance(args):
    model = regress.GbdtModel.from_json(_read_text(args.model))
    pairs, feature_ids, X, y = _load_training_rows(args.features, args.targets)
    if model.feature_ids and tuple(feature_ids) != model.feature_ids:
        raise SyndiffError("feature columns do not match the model's feature ids")
    report = regress.importance_report(model, X, y, repeats=args.repeats, seed=args.seed)
    meta = {
        "repeats": args.repeats,
        "seed": args.seed,
        "pairs": len(pairs),
        "inputs": _digests([args.model, args.features, args.targets]),
    }
    outputs = _write_csv_artifact(args.output, report.to_csv(), meta)
    top = np.argsort(-report.permutation_mean, kind="stable")[:5]
    return {
        "command": "importance",
        "outputs": outputs,
        "top_features": [report.feature_ids[i] for i in top],
    }


def cmd_select_source(args):
    model = regress.GbdtModel.from_json(_read_text(args.model))
    profiles = typology.load_wals_csv(_read_text(args.wals))
    if args.target not in profiles:
        raise SyndiffError(f"target language {args.target!r} absent from the WALS table")
    if args.candidates:
        codes = args.candidates.split(",")
        absent = [c for c in codes if c not in profiles]
        if absent:
            raise SyndiffError(f"candidate languages absent from the WALS table: {absent}")
    else:
        codes = [c for c in sorted(profiles) if c != args.target]
    ranked = regress.select_source(model, profiles[args.target], [profiles[c] for c in codes])
    payload = {
        "target": args.target,
        "ranking": [
            {"language": c.language, "predicted_distance": c.predicted_distance} for c in ranked
        ],
        "inputs": _digests([args.model, args.wals]),
    }
    write_text_atomic(args.output, _dumps(payload))
    return {
        "command": "select-source",
        "outputs": [args.output],
        "target": args.target,
        "best": ranked[0].language,
    }


def cmd_ndcg(args):
    pred = json.loads(_read_text(args.pred))
    target = args.target or pred.get("target")
    if not target:
        raise SyndiffError("no target language: pass --target or use a ranking artifact")
    order = [entry["language"] for entry in pred["ranking"]]
    table = analysis.TransferTable.from_csv(_read_text(args.gold))
    if target not in table.codes:
        raise SyndiffError(f"target {target!r} absent from the LAS table")
    col = table.codes.index(target)
    las_row = {
        code: float(table.values[i, col]) for i, code in enumerate(table.codes) if code in order
    }
    missing = [c for c in order if c not in las_row]
    if missing:
        raise SyndiffError(f"LAS table lacks candidate sources: {missing}")
    score = analysis.ndcg_at_k(order, analysis.relevance_grades(las_row), k=args.k)
    payload = {
        "target": target,
        "k": args.k,
        "ndcg": score,
        "order": order,
        "inputs": _digests([args.pred, args.gold]),
    }
    outputs = []
    if args.output:
        write_text_atomic(args.output, _dumps(payload))
        outputs.append(args.output)
    return {"command": "ndcg", "outputs": outputs, "ndcg": score, "k": args.k}


def cmd_pca_export(args):
    ds = embeddings.load_dataset(args.dataset)
    projection = analysis.pca_project(ds.features, args.dims)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["label", *[f"pc{i + 1}" for i in range(args.dims)]])
    for label, row in zip(ds.labels, projection.projected):
        writer.writerow([label, *[repr(float(v)) for v in row]])
    meta = {
        "dims": args.dims,
        "explained_variance": projection.explained_variance.tolist(),
        "inputs": _digests([args.dataset]),
        "language": ds.language,
        "layer": ds.layer,
    }
    outputs = _write_csv_artifact(args.output, buf.getvalue(), meta)
    return {
        "command": "pca-export",
        "outputs": outputs,
        "dims": args.dims,
        "items": len(ds),
    }


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_otdd_flags(sub):
    sub.add_argument("--p", type=float, default=2.0)
    sub.add_argument("--eps", type=float, default=_env("EPS", otdd.DEFAULT_EPS))
    sub.add_argument("--max-iter", type=int, default=_env("MAX_ITER", otdd.DEFAULT_MAX_ITER))
    sub.add_argument("--marginal-tol", type=float, default=otdd.DEFAULT_MARGINAL_TOL)
    sub.add_argument("--label-mode", choices=otdd.LABEL_MODES, default="empirical-sinkhorn")
    sub.add_argument("--cost-mode", choices=otdd.COST_MODES, default="squared")


def _add_gbdt_flags(sub):
    sub.add_argument("--n-estimators", type=int, default=regress.DEFAULT_ESTIMATORS)
    sub.add_argument("--max-depth", type=int, default=regress.DEFAULT_MAX_DEPTH)
    sub.add_argument("--learning-rate", type=float, default=regress.DEFAULT_LEARNING_RATE)
    sub.add_argument("--min-samples-leaf", type=int, default=1)
    sub.add_argument("--imputation", choices=("mean", "sentinel"), default="mean")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="syndiff",
        description="Syntactic difference between languages via optimal transport "
        "over grammatical-relation vectors, with typological regression.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=_env("SEED", 0))
    common.add_argument("--jobs", type=int, default=_env("JOBS", os.cpu_count() or 1))
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("parse-treebank", parents=[common], help="CoNLL-U to relation pairs")
    p.add_argument("--input", required=True)
    p.add_argument("--language", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--summary")
    p.add_argument("--keep-subtypes", action="store_true")
    p.set_defaults(func=cmd_parse_treebank)

    p = sub.add_parser("validate", parents=[common], help="check file formats without computing")
    p.add_argument("--ldeb", nargs="*")
    p.add_argument("--ldds", nargs="*")
    p.add_argument("--wals")
    p.add_argument("--params")
    p.add_argument("--las")
    p.add_argument("--matrix")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("build-dataset", parents=[common], help="join treebank with embeddings")
    p.add_argument("--treebank", required=True)
    p.add_argument("--language", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--max-items", type=int, default=embeddings.DEFAULT_MAX_ITEMS)
    p.add_argument("--per-label-min", type=int, default=embeddings.DEFAULT_PER_LABEL_MIN)
    p.add_argument("--keep-subtypes", action="store_true")
    p.set_defaults(func=cmd_build_dataset)

    p = sub.add_parser("otdd", parents=[common], help="dataset distance between two LDDS files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--output", required=True)
    _add_otdd_flags(p)
    p.set_defaults(func=cmd_otdd)

    p = sub.add_parser("distance-matrix", parents=[common], help="all-pairs dataset distances")
    p.add_argument("--datasets", nargs="+", required=True)
    p.add_argument("--output", required=True)
    _add_otdd_flags(p)
    p.set_defaults(func=cmd_distance_matrix)

    p = sub.add_parser("probe", parents=[common], help="train/evaluate the linear relation probe")
    p.add_argument("--train", required=True)
    p.add_argument("--eval", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--l2", type=float)
    p.add_argument("--strengths")
    p.add_argument("--max-epochs", type=int, default=probe.DEFAULT_MAX_EPOCHS)
    p.add_argument("--patience", type=int, default=probe.DEFAULT_PATIENCE)
    p.add_argument("--model-output")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("formal-dist", parents=[common], help="Jaccard distances over parameter lists")
    p.add_argument("--params", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_formal_dist)

    p = sub.add_parser("wals-dist", parents=[common], help="per-feature cosine distances per pair")
    p.add_argument("--wals", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--features")
    p.add_argument("--average-output")
    p.set_defaults(func=cmd_wals_dist)

    p = sub.add_parser("correlate", parents=[common], help="rank-correlate two distance matrices")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--scatter")
    p.add_argument("--row")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("cluster", parents=[common], help="hierarchical clustering to Newick")
    p.add_argument("--matrix", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--linkage", choices=analysis.LINKAGES, default="average")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("drop", parents=[common], help="LAS drop matrix from a transfer table")
    p.add_argument("--las", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_drop)

    p = sub.add_parser("train-regressor", parents=[common], help="fit the boosted-tree regressor")
    p.add_argument("--features", required=True)
    p.add_argument("--targets", required=True)
    p.add_argument("--output", required=True)
    _add_gbdt_flags(p)
    p.set_defaults(func=cmd_train_regressor)

    p = sub.add_parser("cross-validate", parents=[common], help="k-fold or leave-one-language-out")
    p.add_argument("--features", required=True)
    p.add_argument("--targets", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--mode", choices=("pairs", "language"), default="pairs")
    _add_gbdt_flags(p)
    p.set_defaults(func=cmd_cross_validate)

    p = sub.add_parser("importance", parents=[common], help="impurity and permutation importances")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--targets", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--repeats", type=int, default=30)
    p.set_defaults(func=cmd_importance)

    p = sub.add_parser("select-source", parents=[common], help="rank source languages for a target")
    p.add_argument("--model", required=True)
    p.add_argument("--wals", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--candidates")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_select_source)

    p = sub.add_parser("ndcg", parents=[common], help="ranking quality against gold LAS")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--target")
    p.add_argument("--output")
    p.set_defaults(func=cmd_ndcg)

    p = sub.add_parser("pca-export", parents=[common], help="project a dataset for visualization")
    p.add_argument("--dataset", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--dims", type=int, default=37)
    p.set_defaults(func=cmd_pca_export)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        summary = args.func(args)
    except (SyndiffError, ValueError, OSError) as exc:
        message = {"status": "error", "type": type(exc).__name__, "message": str(exc)}
        print(json.dumps(message, sort_keys=True), file=sys.stderr)
        return 1
    code = summary.pop("exit_code", 0)
    summary["status"] = "ok" if code == 0 else "problems"
    print(json.dumps(summary, sort_keys=True))
    return code


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
