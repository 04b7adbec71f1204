"""Labeled datasets for HDI-category classification and clustering.

The classifier predicts a region's HDI band from five predictors in a
fixed column order: GDP, NPP, NIU, NL, NP.  Labels always derive from
the raw (unscaled) HDI value; feature scaling never touches them.

HDI is handled on the 0-100 scale.  The four UNDP bands use
lower-inclusive cutoffs, default 60 / 70 / 80: an HDI of exactly 70.0
is High.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import (
    DatasetTooSmallError,
    EmptyResultError,
    MissingIndicatorError,
    NonFiniteInputError,
)
from .ingest import IndicatorTable, slice_year

TARGET = "HDI"
PREDICTORS = ("GDP", "NPP", "NIU", "NL", "NP")
ALL_INDICATORS = (TARGET,) + PREDICTORS

SCALING_METHODS = ("min-max", "z-score", "none")


class HdiCategory(IntEnum):
    """The four UNDP development bands, totally ordered."""

    LOW = 0
    MEDIUM = 1
    HIGH = 2
    VERY_HIGH = 3

    @property
    def label(self) -> str:
        return _CATEGORY_LABELS[self.value]

    @classmethod
    def from_label(cls, label: str) -> "HdiCategory":
        try:
            return cls(_CATEGORY_LABELS.index(label.strip()))
        except ValueError:
            raise ValueError(f"unknown HDI category label: {label!r}") from None


_CATEGORY_LABELS = ("Low", "Medium", "High", "VeryHigh")
N_CATEGORIES = len(_CATEGORY_LABELS)


@dataclass(frozen=True)
class CategoryThresholds:
    """Cutoffs t1 < t2 < t3 on the 0-100 HDI scale, lower-inclusive."""

    t1: float = 60.0
    t2: float = 70.0
    t3: float = 80.0

    def __post_init__(self):
        values = (self.t1, self.t2, self.t3)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("thresholds must be finite")
        if not (self.t1 < self.t2 < self.t3):
            raise ValueError(
                f"thresholds must increase: {self.t1} < {self.t2} < {self.t3}")


DEFAULT_THRESHOLDS = CategoryThresholds()


def categorize(hdi: float,
               thresholds: CategoryThresholds = DEFAULT_THRESHOLDS) -> HdiCategory:
    """Map an HDI value (0-100 scale) to its band.

    Low below t1, Medium in [t1, t2), High in [t2, t3), VeryHigh at or
    above t3.  Monotone by construction.
    """
    if not math.isfinite(hdi):
        raise NonFiniteInputError(f"HDI value must be finite, got {hdi!r}")
    if hdi < thresholds.t1:
        return HdiCategory.LOW
    if hdi < thresholds.t2:
        return HdiCategory.MEDIUM
    if hdi < thresholds.t3:
        return HdiCategory.HIGH
    return HdiCategory.VERY_HIGH


@dataclass(frozen=True)
class ColumnScaling:
    """Recorded per-column scaling parameters; always invertible.

    Constant columns scale to 0.0 under both methods; invert() then
    restores the constant from the recorded min/mean.
    """

    method: str
    min: float
    max: float
    mean: float
    std: float

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self.method == "min-max":
            span = self.max - self.min
            if span == 0.0:
                return np.zeros_like(x)
            return (x - self.min) / span
        if self.method == "z-score":
            if self.std == 0.0:
                return np.zeros_like(x)
            return (x - self.mean) / self.std
        return np.asarray(x, dtype=float).copy()

    def invert(self, x: np.ndarray) -> np.ndarray:
        if self.method == "min-max":
            span = self.max - self.min
            if span == 0.0:
                return np.full_like(x, self.min)
            return x * span + self.min
        if self.method == "z-score":
            if self.std == 0.0:
                return np.full_like(x, self.mean)
            return x * self.std + self.mean
        return np.asarray(x, dtype=float).copy()

    def to_dict(self) -> dict:
        return {"method": self.method, "min": self.min, "max": self.max,
                "mean": self.mean, "std": self.std}

    @classmethod
    def from_dict(cls, doc: dict) -> "ColumnScaling":
        return cls(method=doc["method"], min=doc["min"], max=doc["max"],
                   mean=doc["mean"], std=doc["std"])


def fit_scaling(column: np.ndarray, method: str) -> ColumnScaling:
    if method not in SCALING_METHODS:
        raise ValueError(f"unknown scaling method {method!r}; "
                         f"expected one of {SCALING_METHODS}")
    col = np.asarray(column, dtype=float)
    return ColumnScaling(
        method=method,
        min=float(col.min()), max=float(col.max()),
        mean=float(col.mean()), std=float(col.std()),
    )


def scale_matrix(raw: np.ndarray,
                 method: str) -> tuple[np.ndarray, tuple[ColumnScaling, ...]]:
    """Fit and apply per-column scaling; returns (scaled, parameters)."""
    raw = np.asarray(raw, dtype=float)
    scalings = tuple(fit_scaling(raw[:, j], method) for j in range(raw.shape[1]))
    scaled = np.column_stack([
        scalings[j].apply(raw[:, j]) for j in range(raw.shape[1])])
    return scaled, scalings


def apply_scaling(scalings: tuple[ColumnScaling, ...], raw: np.ndarray,
                  clamp: bool = False) -> tuple[np.ndarray, list[int]]:
    """Apply recorded scaling to new raw rows.

    Returns (scaled, out_of_range_columns); a column is flagged when any
    scaled value falls outside [0, 1] for min-max (outside the fitted
    range).  With clamp=True, min-max outputs are clipped into [0, 1].
    """
    raw = np.asarray(raw, dtype=float)
    if raw.ndim == 1:
        raw = raw.reshape(1, -1)
    cols = []
    flagged = []
    for j, scaling in enumerate(scalings):
        col = scaling.apply(raw[:, j])
        if scaling.method == "min-max" and col.size:
            if np.any((col < 0.0) | (col > 1.0)):
                flagged.append(j)
                if clamp:
                    col = np.clip(col, 0.0, 1.0)
        cols.append(col)
    return np.column_stack(cols), flagged


@dataclass
class LabeledDataset:
    """Per-region feature matrix plus HDI-band labels.

    ``features`` is the scaled matrix used for training; ``raw_features``
    keeps the unscaled values for export and re-scaling.  ``labels``
    holds integer category codes (HdiCategory values).  Column order is
    always GDP, NPP, NIU, NL, NP.
    """

    region_ids: list[str]
    features: np.ndarray
    labels: np.ndarray
    scaling: tuple[ColumnScaling, ...]
    raw_features: np.ndarray

    def __len__(self) -> int:
        return len(self.region_ids)

    def categories(self) -> list[HdiCategory]:
        return [HdiCategory(int(code)) for code in self.labels]

    def subset(self, indices) -> "LabeledDataset":
        idx = np.asarray(indices, dtype=int)
        return LabeledDataset(
            region_ids=[self.region_ids[i] for i in idx],
            features=self.features[idx].copy(),
            labels=self.labels[idx].copy(),
            scaling=self.scaling,
            raw_features=self.raw_features[idx].copy(),
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["region", *PREDICTORS, "label"])
        for i, region in enumerate(self.region_ids):
            row = [region]
            row += [repr(float(v)) for v in self.raw_features[i]]
            row.append(HdiCategory(int(self.labels[i])).label)
            writer.writerow(row)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, source: str, scaling: str = "min-max") -> "LabeledDataset":
        """Read (region, raw features, label) rows; refits scaling."""
        reader = csv.reader(io.StringIO(source))
        header = next(reader, None)
        expected = ["region", *PREDICTORS, "label"]
        if header != expected:
            raise ValueError(f"expected header {expected!r}, got {header!r}")
        regions, rows, labels = [], [], []
        for row in reader:
            if not row:
                continue
            regions.append(row[0])
            rows.append([float(v) for v in row[1:-1]])
            labels.append(HdiCategory.from_label(row[-1]).value)
        raw = np.asarray(rows, dtype=float)
        if raw.size == 0:
            raise EmptyResultError("dataset CSV has no data rows")
        scaled, params = scale_matrix(raw, scaling)
        return cls(region_ids=regions, features=scaled,
                   labels=np.asarray(labels, dtype=int), scaling=params,
                   raw_features=raw)

    def to_json(self) -> str:
        doc = {
            "format": "hdikit-dataset",
            "version": 1,
            "regions": self.region_ids,
            "raw_features": [[float(v) for v in row] for row in self.raw_features],
            "labels": [HdiCategory(int(c)).label for c in self.labels],
            "scaling": [s.to_dict() for s in self.scaling],
            "predictors": list(PREDICTORS),
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "LabeledDataset":
        """Rebuild from JSON, re-applying the stored scaling parameters."""
        doc = json.loads(text)
        if doc.get("format") != "hdikit-dataset" or doc.get("version") != 1:
            raise ValueError("not a version-1 dataset document")
        raw = np.asarray(doc["raw_features"], dtype=float)
        params = tuple(ColumnScaling.from_dict(d) for d in doc["scaling"])
        scaled = np.column_stack([
            params[j].apply(raw[:, j]) for j in range(raw.shape[1])])
        labels = np.asarray(
            [HdiCategory.from_label(lb).value for lb in doc["labels"]], dtype=int)
        return cls(region_ids=list(doc["regions"]), features=scaled,
                   labels=labels, scaling=params, raw_features=raw)


@dataclass(frozen=True)
class ClusteringDataset:
    """Raw (HDI, GDP) rows with region ids, for K-means."""

    region_ids: list[str]
    points: np.ndarray

    def __len__(self) -> int:
        return len(self.region_ids)


def _resolve_names(indicator_names: dict[str, str] | None,
                   logical: tuple[str, ...]) -> dict[str, str]:
    mapping = dict(indicator_names or {})
    return {name: mapping.get(name, name) for name in logical}


def _hdi_factor(hdi_scale: str) -> float:
    if hdi_scale == "0-100":
        return 1.0
    if hdi_scale == "0-1":
        return 100.0
    raise ValueError(f"unknown hdi_scale {hdi_scale!r}; expected '0-100' or '0-1'")


def build_classification_dataset(
    table: IndicatorTable,
    year: int,
    thresholds: CategoryThresholds = DEFAULT_THRESHOLDS,
    scaling: str = "min-max",
    indicator_names: dict[str, str] | None = None,
    hdi_scale: str = "0-100",
) -> LabeledDataset:
    """Assemble the (5 predictors -> HDI band) dataset for one year.

    Rows are exactly the regions complete in all six indicators.
    ``indicator_names`` maps logical names (HDI, GDP, ...) to source
    indicator strings; unmapped names are looked up verbatim.
    """
    names = _resolve_names(indicator_names, ALL_INDICATORS)
    known = set(table.indicators)
    missing = [f"{logical} ({source!r})"
               for logical, source in names.items() if source not in known]
    if missing:
        raise MissingIndicatorError(
            f"indicators not found in table: {', '.join(missing)}")

    ordered = [names[TARGET]] + [names[p] for p in PREDICTORS]
    rows = slice_year(table, ordered, year)

    factor = _hdi_factor(hdi_scale)
    regions = list(rows.keys())
    hdi = np.asarray([rows[r][0] for r in regions], dtype=float) * factor
    raw = np.asarray([rows[r][1:] for r in regions], dtype=float)
    labels = np.asarray([categorize(v, thresholds).value for v in hdi], dtype=int)
    scaled, params = scale_matrix(raw, scaling)
    return LabeledDataset(region_ids=regions, features=scaled, labels=labels,
                          scaling=params, raw_features=raw)


def build_clustering_dataset(
    table: IndicatorTable,
    year: int,
    indicator_names: dict[str, str] | None = None,
    hdi_scale: str = "0-100",
) -> ClusteringDataset:
    """One raw (HDI, GDP) row per region complete in both indicators."""
    names = _resolve_names(indicator_names, (TARGET, "GDP"))
    known = set(table.indicators)
    missing = [f"{logical} ({source!r})"
               for logical, source in names.items() if source not in known]
    if missing:
        raise MissingIndicatorError(
            f"indicators not found in table: {', '.join(missing)}")

    rows = slice_year(table, [names[TARGET], names["GDP"]], year)
    factor = _hdi_factor(hdi_scale)
    regions = list(rows.keys())
    points = np.asarray([rows[r] for r in regions], dtype=float)
    points[:, 0] *= factor
    return ClusteringDataset(region_ids=regions, points=points)


@dataclass(frozen=True)
class SplitSpec:
    """Seeded train/test split; test size = round(fraction * n), in [1, n-1]."""

    test_fraction: float = 0.2
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not (0.0 < self.test_fraction < 1.0):
            raise ValueError(
                f"test_fraction must be in (0, 1), got {self.test_fraction}")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


def _test_size(n: int, fraction: float) -> int:
    return min(max(round(fraction * n), 1), n - 1)


def split(dataset: LabeledDataset,
          spec: SplitSpec) -> tuple[LabeledDataset, LabeledDataset]:
    """Deterministic, optionally stratified train/test partition.

    Stratification allocates per-class test quotas by largest
    remainder, so class proportions in the test set match the full set
    within rounding.  Identical (dataset, spec) always yields the same
    partition.
    """
    n = len(dataset)
    if n < 2:
        raise DatasetTooSmallError(f"need at least 2 rows to split, got {n}")
    n_test = _test_size(n, spec.test_fraction)
    rng = np.random.default_rng(spec.seed)

    if spec.stratified:
        test_idx: list[int] = []
        class_members = [np.flatnonzero(dataset.labels == c)
                         for c in range(N_CATEGORIES)]
        quotas = _stratified_quotas([len(m) for m in class_members], n_test)
        for members, quota in zip(class_members, quotas):
            if len(members) == 0:
                continue
            perm = rng.permutation(len(members))
            test_idx.extend(int(members[i]) for i in perm[:quota])
    else:
        perm = rng.permutation(n)
        test_idx = [int(i) for i in perm[:n_test]]

    test_set = sorted(test_idx)
    train_set = [i for i in range(n) if i not in set(test_set)]
    return dataset.subset(train_set), dataset.subset(test_set)


def _stratified_quotas(class_sizes: list[int], n_test: int) -> list[int]:
    """Largest-remainder allocation of n_test across classes."""
    n = sum(class_sizes)
    exact = [n_test * size / n for size in class_sizes]
    base = [math.floor(q) for q in exact]
    leftover = n_test - sum(base)
    # stable priority: biggest fractional part, then bigger class, then index
    order = sorted(range(len(class_sizes)),
                   key=lambda c: (-(exact[c] - base[c]), -class_sizes[c], c))
    for c in order:
        if leftover == 0:
            break
        if base[c] < class_sizes[c]:
            base[c] += 1
            leftover -= 1
    return base
