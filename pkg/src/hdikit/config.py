"""Pipeline configuration: versioned JSON file + flag overrides.

One PipelineConfig drives every command.  Values come from defaults,
then an optional --config file, then command-line flags (flags win).
The effective config is echoed into the output directory for
provenance; the echo deliberately omits output paths so two runs into
different directories still produce byte-identical trees.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .errors import BadConfigError
from .features import PREDICTORS, TARGET, CategoryThresholds
from .network import ERROR_METRICS

CONFIG_VERSION = 1

_DEFAULT_INDICATORS = {name: name for name in (TARGET, *PREDICTORS)}


@dataclass
class PipelineConfig:
    """Everything the pipeline needs besides the input/output paths."""

    seed: int = 0
    input_csv: str | None = None
    output_dir: str | None = None
    model_file: str | None = None
    region_column: str = "Area Name"
    indicator_column: str = "Indicator Name"
    delimiter: str = ","
    permissive_numbers: bool = False
    drop_bad_rows: bool = False
    indicators: dict = field(default_factory=lambda: dict(_DEFAULT_INDICATORS))
    classification_year: int = 2010
    clustering_year: int = 2012
    thresholds: tuple = (60.0, 70.0, 80.0)
    hdi_scale: str = "0-100"
    scaling: str = "min-max"
    epochs: int = 500
    learning_rate: float = 0.5
    batch_mode: str = "full-batch"
    batch_size: int | None = None
    shuffle: bool = False
    hidden_neurons: int = 20
    hidden_activation: str = "logistic-sigmoid"
    sweep_hidden_sizes: tuple = (10, 13, 16, 20)
    sweep_runs: int = 10
    error_metric: str = "misclassification-count"
    k: int = 4
    kmeans_init: str = "kmeanspp"
    kmeans_max_iters: int = 300
    kmeans_tol: float = 1e-6
    kmeans_scale: bool = False
    test_fraction: float = 0.2
    stratified: bool = True
    jobs: int = 1

    def category_thresholds(self) -> CategoryThresholds:
        t1, t2, t3 = self.thresholds
        return CategoryThresholds(float(t1), float(t2), float(t3))


def validate(cfg: PipelineConfig) -> PipelineConfig:
    """Check invariants; raises BadConfigError with the offending field."""
    for name, year in (("classification_year", cfg.classification_year),
                       ("clustering_year", cfg.clustering_year)):
        if not isinstance(year, int) or year <= 0:
            raise BadConfigError(f"{name} must be a positive integer, got {year!r}")
    for logical in (TARGET, *PREDICTORS):
        source = cfg.indicators.get(logical)
        if not isinstance(source, str) or not source:
            raise BadConfigError(
                f"indicator mapping for {logical!r} missing or not a string")
    t1, t2, t3 = cfg.thresholds
    if not (t1 < t2 < t3):
        raise BadConfigError(f"thresholds must increase, got {cfg.thresholds}")
    if cfg.hdi_scale not in ("0-100", "0-1"):
        raise BadConfigError(f"hdi_scale must be '0-100' or '0-1', got {cfg.hdi_scale!r}")
    if cfg.scaling not in ("min-max", "z-score", "none"):
        raise BadConfigError(f"unknown scaling {cfg.scaling!r}")
    if cfg.epochs < 1:
        raise BadConfigError(f"epochs must be >= 1, got {cfg.epochs}")
    if cfg.learning_rate < 0:
        raise BadConfigError(f"learning_rate must be >= 0, got {cfg.learning_rate}")
    if cfg.hidden_neurons < 1:
        raise BadConfigError(f"hidden_neurons must be >= 1, got {cfg.hidden_neurons}")
    if not cfg.sweep_hidden_sizes or any(h < 1 for h in cfg.sweep_hidden_sizes):
        raise BadConfigError(f"bad sweep_hidden_sizes {cfg.sweep_hidden_sizes}")
    if cfg.sweep_runs < 1:
        raise BadConfigError(f"sweep_runs must be >= 1, got {cfg.sweep_runs}")
    if cfg.error_metric not in ERROR_METRICS:
        raise BadConfigError(f"error_metric must be one of {ERROR_METRICS}")
    if cfg.k < 1:
        raise BadConfigError(f"k must be >= 1, got {cfg.k}")
    if cfg.kmeans_init not in ("kmeanspp", "random", "provided"):
        raise BadConfigError(f"unknown kmeans_init {cfg.kmeans_init!r}")
    if not (0.0 < cfg.test_fraction < 1.0):
        raise BadConfigError(
            f"test_fraction must be in (0, 1), got {cfg.test_fraction}")
    if cfg.jobs < 1:
        raise BadConfigError(f"jobs must be >= 1, got {cfg.jobs}")
    return cfg


_SECTIONS = {
    "input": {"csv": "input_csv", "region_column": "region_column",
              "indicator_column": "indicator_column", "delimiter": "delimiter",
              "permissive_numbers": "permissive_numbers",
              "drop_bad_rows": "drop_bad_rows"},
    "years": {"classification": "classification_year",
              "clustering": "clustering_year"},
    "train": {"epochs": "epochs", "learning_rate": "learning_rate",
              "batch_mode": "batch_mode", "batch_size": "batch_size",
              "shuffle": "shuffle", "hidden_neurons": "hidden_neurons",
              "hidden_activation": "hidden_activation"},
    "sweep": {"hidden_sizes": "sweep_hidden_sizes",
              "runs_per_config": "sweep_runs", "error_metric": "error_metric"},
    "kmeans": {"k": "k", "init": "kmeans_init", "max_iters": "kmeans_max_iters",
               "tol": "kmeans_tol", "scale": "kmeans_scale"},
    "split": {"test_fraction": "test_fraction", "stratified": "stratified"},
    "output": {"dir": "output_dir", "model_file": "model_file"},
}
_TOP_LEVEL = {"seed": "seed", "hdi_scale": "hdi_scale", "scaling": "scaling",
              "jobs": "jobs"}


def load_config(path) -> PipelineConfig:
    """Parse a version-1 JSON config file; unknown keys are rejected."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise BadConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BadConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise BadConfigError("config root must be a JSON object")
    if doc.get("config_version") != CONFIG_VERSION:
        raise BadConfigError(
            f"config_version must be {CONFIG_VERSION}, got "
            f"{doc.get('config_version')!r}")

    fields = {}
    for key, value in doc.items():
        if key == "config_version":
            continue
        if key in _TOP_LEVEL:
            fields[_TOP_LEVEL[key]] = value
        elif key == "indicators":
            if not isinstance(value, dict):
                raise BadConfigError("'indicators' must be an object")
            merged = dict(_DEFAULT_INDICATORS)
            merged.update(value)
            fields["indicators"] = merged
        elif key == "thresholds":
            fields["thresholds"] = tuple(float(v) for v in value)
        elif key in _SECTIONS:
            if not isinstance(value, dict):
                raise BadConfigError(f"{key!r} must be an object")
            for sub, inner in value.items():
                if sub not in _SECTIONS[key]:
                    raise BadConfigError(f"unknown config key {key}.{sub}")
                fields[_SECTIONS[key][sub]] = inner
        else:
            raise BadConfigError(f"unknown config key {key!r}")
    if "sweep_hidden_sizes" in fields:
        fields["sweep_hidden_sizes"] = tuple(int(h) for h in fields["sweep_hidden_sizes"])
    return validate(PipelineConfig(**fields))


def apply_overrides(cfg: PipelineConfig, overrides: dict) -> PipelineConfig:
    """Non-None override values (CLI flags) replace config-file values."""
    updates = {k: v for k, v in overrides.items() if v is not None}
    if "sweep_hidden_sizes" in updates:
        updates["sweep_hidden_sizes"] = tuple(int(h) for h in updates["sweep_hidden_sizes"])
    if "thresholds" in updates:
        updates["thresholds"] = tuple(float(v) for v in updates["thresholds"])
    return validate(replace(cfg, **updates))


def echo_json(cfg: PipelineConfig) -> str:
    """The effective config as JSON, minus output paths (provenance echo)."""
    doc = {
        "config_version": CONFIG_VERSION,
        "seed": cfg.seed,
        "hdi_scale": cfg.hdi_scale,
        "scaling": cfg.scaling,
        "jobs": cfg.jobs,
        "input": {"csv": cfg.input_csv, "region_column": cfg.region_column,
                  "indicator_column": cfg.indicator_column,
                  "delimiter": cfg.delimiter,
                  "permissive_numbers": cfg.permissive_numbers,
                  "drop_bad_rows": cfg.drop_bad_rows},
        "indicators": dict(sorted(cfg.indicators.items())),
        "years": {"classification": cfg.classification_year,
                  "clustering": cfg.clustering_year},
        "thresholds": list(cfg.thresholds),
        "train": {"epochs": cfg.epochs, "learning_rate": cfg.learning_rate,
                  "batch_mode": cfg.batch_mode, "batch_size": cfg.batch_size,
                  "shuffle": cfg.shuffle, "hidden_neurons": cfg.hidden_neurons,
                  "hidden_activation": cfg.hidden_activation},
        "sweep": {"hidden_sizes": list(cfg.sweep_hidden_sizes),
                  "runs_per_config": cfg.sweep_runs,
                  "error_metric": cfg.error_metric},
        "kmeans": {"k": cfg.k, "init": cfg.kmeans_init,
                   "max_iters": cfg.kmeans_max_iters, "tol": cfg.kmeans_tol,
                   "scale": cfg.kmeans_scale},
        "split": {"test_fraction": cfg.test_fraction,
                  "stratified": cfg.stratified},
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
