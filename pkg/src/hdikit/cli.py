"""Command-line front end: ingest, classify, cluster, evaluate, report.

Every command reads an optional --config JSON file, applies flag
overrides (flags win), writes its artifacts into --out, and echoes the
effective config there as config_used.json.  Exit codes: 0 success,
1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from .cluster import (assignments_csv, centroids_json, kmeans_fit,
                      load_centroids, overlaps_json, summarize)
from .config import PipelineConfig, apply_overrides, echo_json, load_config
from .errors import DataError, NumericError
from .evaluation import confusion, metrics_json, render_csv, render_text
from .features import (PREDICTORS, HdiCategory, SplitSpec, apply_scaling,
                       build_classification_dataset, build_clustering_dataset,
                       split)
from .ingest import WideCsvFormat, completeness, parse_wide_csv, slice_year
from .network import (TrainConfig, evaluation_error, forward_batch,
                      init_network, load_model, predict, save_model, sweep,
                      train)
from .svgplot import scatter_svg


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this toolkit reserves 2 for
    data errors, so usage problems are remapped to exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _comma_ints(text: str) -> tuple:
    return tuple(int(part) for part in text.split(","))


def _comma_floats(text: str) -> tuple:
    return tuple(float(part) for part in text.split(","))


def _comma_names(text: str) -> list:
    return [part.strip() for part in text.split(",") if part.strip()]


# argparse dest -> PipelineConfig field; only non-None values override
_FLAG_FIELDS = {
    "seed": "seed", "jobs": "jobs", "input": "input_csv",
    "out": "output_dir", "model": "model_file",
    "region_col": "region_column", "indicator_col": "indicator_column",
    "delimiter": "delimiter", "permissive_numbers": "permissive_numbers",
    "drop_bad_rows": "drop_bad_rows",
    "hdi_scale": "hdi_scale", "scaling": "scaling",
    "class_year": "classification_year", "cluster_year": "clustering_year",
    "thresholds": "thresholds", "epochs": "epochs", "lr": "learning_rate",
    "hidden": "hidden_neurons", "sizes": "sweep_hidden_sizes",
    "runs": "sweep_runs", "metric": "error_metric", "k": "k",
    "init": "kmeans_init", "max_iters": "kmeans_max_iters",
    "tol": "kmeans_tol", "kmeans_scale": "kmeans_scale",
    "test_fraction": "test_fraction", "stratified": "stratified",
}


def _effective_config(args) -> PipelineConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else PipelineConfig()
    overrides = {}
    for dest, field in _FLAG_FIELDS.items():
        if getattr(args, dest, None) is not None:
            overrides[field] = getattr(args, dest)
    return apply_overrides(cfg, overrides)


def _csv_format(cfg: PipelineConfig) -> WideCsvFormat:
    return WideCsvFormat(region_col=cfg.region_column,
                         indicator_col=cfg.indicator_column,
                         delimiter=cfg.delimiter,
                         permissive_numbers=cfg.permissive_numbers,
                         drop_bad_rows=cfg.drop_bad_rows)


def _out_dir(cfg: PipelineConfig) -> str:
    out = cfg.output_dir or "out"
    os.makedirs(out, exist_ok=True)
    return out


def _write(out: str, name: str, text: str) -> None:
    with open(os.path.join(out, name), "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _train_config(cfg: PipelineConfig) -> TrainConfig:
    return TrainConfig(epochs=cfg.epochs, learning_rate=cfg.learning_rate,
                       batch_mode=cfg.batch_mode, batch_size=cfg.batch_size,
                       seed=cfg.seed, shuffle=cfg.shuffle)


def _split_spec(cfg: PipelineConfig) -> SplitSpec:
    return SplitSpec(test_fraction=cfg.test_fraction, seed=cfg.seed,
                     stratified=cfg.stratified)


def _classification_dataset(cfg: PipelineConfig, table):
    return build_classification_dataset(
        table, cfg.classification_year, cfg.category_thresholds(),
        scaling=cfg.scaling, indicator_names=cfg.indicators,
        hdi_scale=cfg.hdi_scale)


# --- commands ---

def cmd_ingest(args) -> int:
    cfg = _effective_config(args)
    table = parse_wide_csv(cfg.input_csv, _csv_format(cfg))
    report = completeness(table)
    out = _out_dir(cfg)
    _write(out, "completeness.csv", report.to_csv())
    _write(out, "completeness.json", report.to_json())
    _write(out, "config_used.json", echo_json(cfg))
    print(f"parsed {len(table.regions)} regions x {len(table.indicators)} "
          f"indicators over years {min(table.years)}-{max(table.years)}")
    print(f"wrote completeness.csv completeness.json -> {out}")
    return 0


def cmd_classify_train(args) -> int:
    cfg = _effective_config(args)
    table = parse_wide_csv(cfg.input_csv, _csv_format(cfg))
    dataset = _classification_dataset(cfg, table)
    train_set, test_set = split(dataset, _split_spec(cfg))
    model = init_network((len(PREDICTORS), cfg.hidden_neurons, 4),
                         hidden_activation=cfg.hidden_activation,
                         seed=cfg.seed)
    model, trace = train(model, train_set, _train_config(cfg))
    out = _out_dir(cfg)
    save_model(model, os.path.join(out, "model.json"))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["epoch", "loss"])
    for epoch, loss in enumerate(trace):
        writer.writerow([epoch, repr(loss)])
    _write(out, "training_trace.csv", buf.getvalue())
    holdout = evaluation_error(model, test_set.features,
                               np.asarray(test_set.labels), cfg.error_metric)
    summary = {
        "hidden_neurons": cfg.hidden_neurons,
        "epochs": cfg.epochs,
        "final_loss": trace[-1],
        "train_rows": len(train_set),
        "holdout_rows": len(test_set),
        "holdout_error": holdout,
        "error_metric": cfg.error_metric,
    }
    _write(out, "train_summary.json",
           json.dumps(summary, indent=2, sort_keys=True) + "\n")
    _write(out, "config_used.json", echo_json(cfg))
    print(f"trained 5:{cfg.hidden_neurons}:4 for {cfg.epochs} epochs; "
          f"final loss {trace[-1]:.6f}, holdout {cfg.error_metric} {holdout:g}")
    print(f"wrote model.json training_trace.csv train_summary.json -> {out}")
    return 0


def cmd_classify_sweep(args) -> int:
    cfg = _effective_config(args)
    table = parse_wide_csv(cfg.input_csv, _csv_format(cfg))
    dataset = _classification_dataset(cfg, table)
    result = sweep(dataset, hidden_sizes=cfg.sweep_hidden_sizes,
                   runs_per_config=cfg.sweep_runs, config=_train_config(cfg),
                   error_metric=cfg.error_metric, split_spec=_split_spec(cfg),
                   hidden_activation=cfg.hidden_activation, jobs=cfg.jobs)
    out = _out_dir(cfg)
    _write(out, "sweep_runs.csv", result.runs_csv())
    _write(out, "sweep_summary.json", result.summary_json())
    save_model(result.best_model, os.path.join(out, "best_model.json"))
    _write(out, "config_used.json", echo_json(cfg))
    for entry in result.entries:
        print(f"hidden {entry.hidden_neurons:>3}: mean {cfg.error_metric} "
              f"{entry.mean_error:g} over {len(entry.run_errors)} runs")
    print(f"best: {result.best.hidden_neurons} hidden neurons "
          f"(mean {result.best.mean_error:g})")
    print(f"wrote sweep_runs.csv sweep_summary.json best_model.json -> {out}")
    return 0


def _predict_frame(cfg: PipelineConfig, table, model, clamp: bool):
    """Raw predictor rows for the model, via its stored scaling."""
    mapped = [cfg.indicators[name] for name in PREDICTORS]
    rows = slice_year(table, mapped, cfg.classification_year)
    regions = list(rows)
    raw = np.asarray([rows[r] for r in regions], dtype=float)
    if model.feature_scaling is not None:
        scaled, flagged = apply_scaling(model.feature_scaling, raw, clamp=clamp)
    else:
        scaled, flagged = raw, []
    return regions, scaled, flagged


def cmd_classify_predict(args) -> int:
    cfg = _effective_config(args)
    if not cfg.model_file:
        print("classify predict: error: --model is required", file=sys.stderr)
        return 1
    model = load_model(cfg.model_file)
    table = parse_wide_csv(cfg.input_csv, _csv_format(cfg))
    regions, scaled, flagged = _predict_frame(cfg, table, model, args.clamp)
    if flagged and not args.clamp:
        print(f"warning: features outside the training range in columns "
              f"{[PREDICTORS[j] for j in flagged]}; predictions extrapolate "
              f"(pass --clamp to clip into range)", file=sys.stderr)
    labels = predict(model, scaled)
    probs = forward_batch(model, scaled)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["region", "predicted_category", "probabilities"])
    for i, region in enumerate(regions):
        writer.writerow([region, HdiCategory(int(labels[i])).label,
                         ";".join(repr(float(p)) for p in probs[i])])
    out = _out_dir(cfg)
    _write(out, "predictions.csv", buf.getvalue())
    _write(out, "config_used.json", echo_json(cfg))
    print(f"predicted {len(regions)} regions -> {out}/predictions.csv")
    return 0


def cmd_cluster(args) -> int:
    cfg = _effective_config(args)
    if getattr(args, "centroids", None):
        cfg = apply_overrides(cfg, {"kmeans_init": "provided"})
        starting = load_centroids(args.centroids)
    else:
        starting = None
    table = parse_wide_csv(cfg.input_csv, _csv_format(cfg))
    dataset = build_clustering_dataset(table, cfg.clustering_year,
                                       indicator_names=cfg.indicators,
                                       hdi_scale=cfg.hdi_scale)
    model = kmeans_fit(dataset.points, cfg.k, init=cfg.kmeans_init,
                       seed=cfg.seed, max_iters=cfg.kmeans_max_iters,
                       tol=cfg.kmeans_tol, centroids=starting,
                       scale=cfg.kmeans_scale)
    summary = summarize(model, dataset.points, cfg.category_thresholds())
    out = _out_dir(cfg)
    _write(out, "assignments.csv",
           assignments_csv(model, dataset.region_ids, dataset.points))
    _write(out, "cluster_summary.json", summary.to_json())
    _write(out, "overlaps.json", overlaps_json(summary))
    _write(out, "centroids.json", centroids_json(model))
    _write(out, "scatter.svg",
           scatter_svg(dataset.points, model.assignments,
                       model.centroids_unscaled()))
    _write(out, "config_used.json", echo_json(cfg))
    sizes = ", ".join(f"{e.cluster}:{e.size}" for e in summary.entries)
    print(f"k={model.k} over {len(dataset)} regions; converged="
          f"{model.converged} after {model.iterations_run} iterations; "
          f"wcss {model.wcss:.4f}")
    print(f"cluster sizes (by mean HDI): {sizes}")
    print(f"wrote assignments.csv cluster_summary.json overlaps.json "
          f"centroids.json scatter.svg -> {out}")
    return 0


def _read_pairs(path) -> tuple:
    """actual,predicted label pairs; names or 0..3 integers accepted."""

    def to_index(cell: str) -> int:
        cell = cell.strip()
        try:
            value = int(cell)
        except ValueError:
            return int(HdiCategory.from_label(cell))
        if not 0 <= value <= 3:
            raise DataError(f"label index {value} outside 0..3")
        return value

    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or \
                not {"actual", "predicted"} <= set(reader.fieldnames):
            raise DataError(
                f"{path}: expected columns 'actual' and 'predicted'")
        actual, predicted = [], []
        for record in reader:
            actual.append(to_index(record["actual"]))
            predicted.append(to_index(record["predicted"]))
    return actual, predicted


def cmd_evaluate(args) -> int:
    cfg = _effective_config(args)
    if args.pairs:
        actual, predicted = _read_pairs(args.pairs)
    else:
        if not cfg.input_csv or not cfg.model_file:
            print("evaluate: error: need either --pairs or an input CSV "
                  "with --model", file=sys.stderr)
            return 1
        model = load_model(cfg.model_file)
        table = parse_wide_csv(cfg.input_csv, _csv_format(cfg))
        dataset = _classification_dataset(cfg, table)
        if model.feature_scaling is not None:
            scaled, _ = apply_scaling(model.feature_scaling,
                                      dataset.raw_features)
        else:
            scaled = dataset.features
        predicted = predict(model, scaled)
        actual = dataset.labels
    matrix = confusion(actual, predicted)
    out = _out_dir(cfg)
    text = render_text(matrix, display_order=args.display_order,
                       elide_empty=not args.full)
    _write(out, "confusion.txt", text)
    _write(out, "confusion.csv", render_csv(matrix))
    _write(out, "metrics.json", metrics_json(matrix))
    _write(out, "config_used.json", echo_json(cfg))
    print(text, end="")
    print(f"wrote confusion.txt confusion.csv metrics.json -> {out}")
    return 0


def cmd_report(args) -> int:
    """Full workflow: ingest -> sweep -> holdout evaluation -> cluster."""
    cfg = _effective_config(args)
    table = parse_wide_csv(cfg.input_csv, _csv_format(cfg))
    out = _out_dir(cfg)

    report = completeness(table)
    _write(out, "completeness.csv", report.to_csv())
    _write(out, "completeness.json", report.to_json())

    dataset = _classification_dataset(cfg, table)
    spec = _split_spec(cfg)
    result = sweep(dataset, hidden_sizes=cfg.sweep_hidden_sizes,
                   runs_per_config=cfg.sweep_runs, config=_train_config(cfg),
                   error_metric=cfg.error_metric, split_spec=spec,
                   hidden_activation=cfg.hidden_activation, jobs=cfg.jobs)
    _write(out, "sweep_runs.csv", result.runs_csv())
    _write(out, "sweep_summary.json", result.summary_json())
    best = result.best_model
    save_model(best, os.path.join(out, "best_model.json"))

    _, test_set = split(dataset, spec)
    predicted = predict(best, test_set.features)
    probs = forward_batch(best, test_set.features)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["region", "predicted_category", "probabilities"])
    for i, region in enumerate(test_set.region_ids):
        writer.writerow([region, HdiCategory(int(predicted[i])).label,
                         ";".join(repr(float(p)) for p in probs[i])])
    _write(out, "predictions.csv", buf.getvalue())
    matrix = confusion(test_set.labels, predicted)
    _write(out, "confusion.txt", render_text(matrix))
    _write(out, "confusion.csv", render_csv(matrix))
    _write(out, "metrics.json", metrics_json(matrix))

    cluster_set = build_clustering_dataset(table, cfg.clustering_year,
                                           indicator_names=cfg.indicators,
                                           hdi_scale=cfg.hdi_scale)
    km = kmeans_fit(cluster_set.points, cfg.k, init=cfg.kmeans_init,
                    seed=cfg.seed, max_iters=cfg.kmeans_max_iters,
                    tol=cfg.kmeans_tol, scale=cfg.kmeans_scale)
    summary = summarize(km, cluster_set.points, cfg.category_thresholds())
    _write(out, "assignments.csv",
           assignments_csv(km, cluster_set.region_ids, cluster_set.points))
    _write(out, "cluster_summary.json", summary.to_json())
    _write(out, "overlaps.json", overlaps_json(summary))
    _write(out, "centroids.json", centroids_json(km))
    _write(out, "scatter.svg",
           scatter_svg(cluster_set.points, km.assignments,
                       km.centroids_unscaled()))
    _write(out, "config_used.json", echo_json(cfg))

    print(f"best sweep config: {result.best.hidden_neurons} hidden neurons "
          f"(mean {cfg.error_metric} {result.best.mean_error:g})")
    print(f"holdout confusion over {matrix.total} regions: "
          f"{matrix.correct} correct")
    print(f"k={km.k} clustering of {len(cluster_set)} regions, "
          f"wcss {km.wcss:.4f}")
    print(f"wrote full report -> {out}")
    return 0


# --- parser wiring ---

def _add_common(p) -> None:
    p.add_argument("--config", help="JSON config file (flags override it)")
    p.add_argument("--seed", type=int, help="global random seed")
    p.add_argument("--out", help="output directory (default: out)")


def _add_format(p) -> None:
    p.add_argument("--region-col", dest="region_col",
                   help="region column header")
    p.add_argument("--indicator-col", dest="indicator_col",
                   help="indicator column header")
    p.add_argument("--delimiter", help="CSV delimiter")
    p.add_argument("--permissive-numbers", dest="permissive_numbers",
                   action="store_true", default=None,
                   help="accept thousands separators in numeric cells")
    p.add_argument("--drop-bad-rows", dest="drop_bad_rows",
                   action="store_true", default=None,
                   help="drop rows with unusable cells and exact duplicates "
                        "instead of failing")
    p.add_argument("--hdi-scale", dest="hdi_scale",
                   choices=("0-100", "0-1"), help="HDI input scale")


def _add_classify_common(p) -> None:
    p.add_argument("--year", dest="class_year", type=int,
                   help="classification year")
    p.add_argument("--thresholds", type=_comma_floats,
                   help="category cutoffs t1,t2,t3")
    p.add_argument("--scaling", choices=("min-max", "z-score", "none"),
                   help="feature scaling method")


def _add_train(p) -> None:
    p.add_argument("--epochs", type=int, help="training epochs")
    p.add_argument("--lr", type=float, help="learning rate")
    p.add_argument("--test-fraction", dest="test_fraction", type=float,
                   help="holdout fraction")
    p.add_argument("--no-stratify", dest="stratified", action="store_false",
                   default=None, help="disable stratified splitting")


def build_parser() -> _Parser:
    parser = _Parser(prog="hdikit",
                     description="Regional development indicators: "
                                 "categorize, classify, cluster, evaluate.")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="command")

    p = sub.add_parser("ingest", help="parse a wide CSV, report completeness")
    p.add_argument("input", help="wide-format indicator CSV")
    _add_common(p)
    _add_format(p)
    p.set_defaults(func=cmd_ingest)

    pc = sub.add_parser("classify", help="train, sweep, or predict")
    csub = pc.add_subparsers(dest="subcommand", required=True,
                             metavar="action")

    p = csub.add_parser("train", help="train one network")
    p.add_argument("input")
    _add_common(p)
    _add_format(p)
    _add_classify_common(p)
    _add_train(p)
    p.add_argument("--hidden", type=int, help="hidden-layer size")
    p.add_argument("--metric", choices=("misclassification-count", "sse",
                                        "cross-entropy"),
                   help="holdout error metric")
    p.set_defaults(func=cmd_classify_train)

    p = csub.add_parser("sweep", help="grid of hidden sizes x seeded runs")
    p.add_argument("input")
    _add_common(p)
    _add_format(p)
    _add_classify_common(p)
    _add_train(p)
    p.add_argument("--sizes", type=_comma_ints,
                   help="hidden sizes, e.g. 10,13,16,20")
    p.add_argument("--runs", type=int, help="runs per hidden size")
    p.add_argument("--metric", choices=("misclassification-count", "sse",
                                        "cross-entropy"),
                   help="validation error metric")
    p.add_argument("--jobs", type=int, help="parallel training runs")
    p.set_defaults(func=cmd_classify_sweep)

    p = csub.add_parser("predict", help="predict categories with a model")
    p.add_argument("input")
    _add_common(p)
    _add_format(p)
    p.add_argument("--year", dest="class_year", type=int,
                   help="feature year")
    p.add_argument("--model", help="model file from train/sweep")
    p.add_argument("--clamp", action="store_true", default=False,
                   help="clip out-of-range features into the training range")
    p.set_defaults(func=cmd_classify_predict)

    p = sub.add_parser("cluster", help="k-means over (HDI, GDP)")
    p.add_argument("input")
    _add_common(p)
    _add_format(p)
    p.add_argument("--year", dest="cluster_year", type=int,
                   help="clustering year")
    p.add_argument("--k", type=int, help="number of clusters")
    p.add_argument("--init", choices=("kmeanspp", "random", "provided"),
                   help="centroid initialization")
    p.add_argument("--centroids", help="centroid JSON for init=provided")
    p.add_argument("--max-iters", dest="max_iters", type=int)
    p.add_argument("--tol", type=float, help="centroid movement tolerance")
    p.add_argument("--kmeans-scale", dest="kmeans_scale",
                   action="store_true", default=None,
                   help="min-max scale axes before distances")
    p.add_argument("--thresholds", type=_comma_floats,
                   help="category cutoffs t1,t2,t3")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("evaluate", help="confusion matrix and metrics")
    p.add_argument("input", nargs="?", help="wide CSV with actual labels")
    _add_common(p)
    _add_format(p)
    _add_classify_common(p)
    p.add_argument("--model", help="model file to evaluate")
    p.add_argument("--pairs", help="CSV of actual,predicted labels instead "
                                   "of input+model")
    p.add_argument("--display-order", dest="display_order",
                   type=_comma_names,
                   help="row/column order, e.g. High,Medium,Low")
    p.add_argument("--full", action="store_true", default=False,
                   help="keep all-zero classes in the text table")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="full pipeline into one directory")
    p.add_argument("input")
    _add_common(p)
    _add_format(p)
    _add_classify_common(p)
    _add_train(p)
    p.add_argument("--sizes", type=_comma_ints, help="sweep hidden sizes")
    p.add_argument("--runs", type=int, help="runs per hidden size")
    p.add_argument("--metric", choices=("misclassification-count", "sse",
                                        "cross-entropy"))
    p.add_argument("--jobs", type=int, help="parallel training runs")
    p.add_argument("--cluster-year", dest="cluster_year", type=int,
                   help="clustering year")
    p.add_argument("--k", type=int, help="number of clusters")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except NumericError as exc:
        print(f"hdikit: numeric failure: {exc}", file=sys.stderr)
        return 3
    except (DataError, FileNotFoundError) as exc:
        print(f"hdikit: data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
