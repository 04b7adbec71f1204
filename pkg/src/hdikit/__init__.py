"""Regional development-indicator toolkit.

Ingests wide-format indicator CSVs, categorizes regions into the four
HDI bands, trains a small feedforward classifier over five predictors,
clusters regions by (HDI, GDP) with K-means, and evaluates with
confusion matrices.  Everything is seeded and byte-for-byte
reproducible.
"""

from .cluster import (ClusterModel, ClusterSummary, assign, assignments_csv,
                      centroids_json, cluster_overlap_report, kmeans_fit,
                      load_centroids, summarize)
from .config import PipelineConfig, apply_overrides, echo_json, load_config
from .errors import (BadConfigError, CorruptModelFileError, DataError,
                     DegenerateInputError, DimensionMismatchError,
                     DivergedLossError, DuplicateKeyError, EmptyInputError,
                     EmptyResultError, HdikitError, LengthMismatchError,
                     MalformedHeaderError, MissingIndicatorError,
                     NonFiniteInputError, NumericError, TooFewPointsError,
                     UnknownIndicatorError, UnknownRegionError,
                     UnparsableCellError)
from .evaluation import (ConfusionMatrix, confusion, metrics, metrics_json,
                         render_csv, render_text)
from .features import (PREDICTORS, TARGET, CategoryThresholds, ColumnScaling,
                       HdiCategory, LabeledDataset, SplitSpec,
                       build_classification_dataset, build_clustering_dataset,
                       categorize, split)
from .ingest import (CompletenessReport, IndicatorTable, WideCsvFormat,
                     completeness, parse_wide_csv, slice_year, write_wide_csv)
from .network import (NetworkModel, SweepResult, TrainConfig, forward,
                      forward_batch, init_network, load_model, predict,
                      save_model, sweep, train)
from .svgplot import scatter_svg

__version__ = "0.1.0"

__all__ = [
    "BadConfigError", "CategoryThresholds", "ClusterModel", "ClusterSummary",
    "ColumnScaling", "CompletenessReport", "ConfusionMatrix",
    "CorruptModelFileError", "DataError", "DegenerateInputError",
    "DimensionMismatchError", "DivergedLossError", "DuplicateKeyError",
    "EmptyInputError", "EmptyResultError", "HdiCategory", "HdikitError",
    "IndicatorTable", "LabeledDataset", "LengthMismatchError",
    "MalformedHeaderError", "MissingIndicatorError", "NetworkModel",
    "NonFiniteInputError", "NumericError", "PipelineConfig", "PREDICTORS",
    "SplitSpec", "SweepResult", "TARGET", "TooFewPointsError", "TrainConfig",
    "UnknownIndicatorError", "UnknownRegionError", "UnparsableCellError",
    "WideCsvFormat", "apply_overrides", "assign", "assignments_csv",
    "build_classification_dataset", "build_clustering_dataset", "categorize",
    "centroids_json", "cluster_overlap_report", "completeness", "confusion",
    "echo_json", "forward", "forward_batch", "init_network", "kmeans_fit",
    "load_centroids", "load_config", "load_model", "metrics", "metrics_json",
    "parse_wide_csv", "predict", "render_csv", "render_text", "save_model",
    "scatter_svg", "slice_year", "split", "summarize", "sweep", "train",
    "write_wide_csv",
]
