"""Lloyd's K-means over (HDI, GDP) points.

Fitting alternates nearest-centroid assignment (squared Euclidean,
ties to the lower index) with centroid-mean updates until the
assignment reaches a fixed point, centroid movement drops below the
tolerance, or the iteration cap hits.  Everything is seeded and
deterministic: identical inputs and settings reproduce the model
bit-for-bit.

The seeded k-means++ initializer draws its D^2 samples over a
lexicographically sorted view of the points, so the chosen starting
centroids depend only on the point multiset and the seed, never on the
input row order.

An empty cluster arising mid-run is repaired by donating the farthest
point of the largest cluster; the repair may transiently raise the
objective, which otherwise never increases between iterations.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateInputError,
    LengthMismatchError,
    NonFiniteInputError,
    TooFewPointsError,
)
from .features import (
    CategoryThresholds,
    ColumnScaling,
    DEFAULT_THRESHOLDS,
    HdiCategory,
    categorize,
    scale_matrix,
)

INIT_METHODS = ("kmeanspp", "random", "provided")

CENTROIDS_MAGIC = "hdikit-centroids"
CENTROIDS_VERSION = 1


@dataclass
class ClusterModel:
    """A fitted clustering: centroids, assignments, and diagnostics.

    ``wcss_trace`` records the objective after every iteration's
    update+assignment cycle.  When fitting scaled the features,
    ``feature_scaling`` holds the recorded parameters and the centroids
    live in the scaled space.
    """

    k: int
    centroids: np.ndarray
    assignments: np.ndarray
    iterations_run: int
    converged: bool
    wcss: float
    feature_scaling: tuple[ColumnScaling, ...] | None = None
    wcss_trace: list[float] = field(default_factory=list)
    init: str = "kmeanspp"
    seed: int = 0

    def centroids_unscaled(self) -> np.ndarray:
        if self.feature_scaling is None:
            return self.centroids.copy()
        return np.column_stack([
            self.feature_scaling[j].invert(self.centroids[:, j])
            for j in range(self.centroids.shape[1])])


def _check_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if not np.all(np.isfinite(pts)):
        raise NonFiniteInputError("points contain NaN or infinity")
    return pts


def _sq_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _wcss(points: np.ndarray, centroids: np.ndarray,
          assignments: np.ndarray) -> float:
    diff = points - centroids[assignments]
    return float(np.einsum("ij,ij->", diff, diff))


def _assign_with_repair(points: np.ndarray,
                        centroids: np.ndarray) -> np.ndarray:
    assignments = np.argmin(_sq_distances(points, centroids), axis=1)
    k = centroids.shape[0]
    sizes = np.bincount(assignments, minlength=k)
    while np.any(sizes == 0):
        empty = int(np.flatnonzero(sizes == 0)[0])
        donor = int(np.argmax(sizes))  # ties -> lower index
        members = np.flatnonzero(assignments == donor)
        dists = np.einsum(
            "ij,ij->i",
            points[members] - centroids[donor],
            points[members] - centroids[donor])
        farthest = int(members[np.argmax(dists)])
        assignments[farthest] = empty
        sizes = np.bincount(assignments, minlength=k)
    return assignments


def _init_kmeanspp(points: np.ndarray, k: int,
                   rng: np.random.Generator) -> np.ndarray:
    # greedy D^2 sampling (best of 2 + floor(ln k) candidates per round),
    # over lexicographically sorted points so the draw is row-order invariant
    order = np.lexsort(tuple(points[:, j] for j in range(points.shape[1] - 1, -1, -1)))
    sorted_pts = points[order]
    n = sorted_pts.shape[0]
    n_trials = 2 + int(np.log(k)) if k > 1 else 1

    chosen = [int(rng.integers(n))]
    d2 = np.einsum("ij,ij->i", sorted_pts - sorted_pts[chosen[0]],
                   sorted_pts - sorted_pts[chosen[0]])
    while len(chosen) < k:
        cum = np.cumsum(d2)
        draws = rng.random(n_trials) * cum[-1]
        candidates = np.minimum(
            np.searchsorted(cum, draws, side="right"), n - 1)
        best = None
        for cand in candidates:
            cand = int(cand)
            cand_d2 = np.einsum("ij,ij->i", sorted_pts - sorted_pts[cand],
                                sorted_pts - sorted_pts[cand])
            pot = float(np.minimum(d2, cand_d2).sum())
            if best is None or pot < best[0]:
                best = (pot, cand, cand_d2)
        chosen.append(best[1])
        d2 = np.minimum(d2, best[2])
    return sorted_pts[chosen].copy()


def kmeans_fit(points, k: int, init: str = "kmeanspp", seed: int = 0,
               max_iters: int = 300, tol: float = 1e-6,
               centroids=None, scale: bool = False) -> ClusterModel:
    """Fit k clusters to (HDI, GDP) rows with Lloyd's algorithm.

    init is one of 'kmeanspp', 'random', or 'provided' (pass the
    starting centroids).  scale=True min-max scales columns before
    distances, recording the parameters on the model.  Raises
    TooFewPointsError (n < k) and DegenerateInputError (fewer than k
    distinct points, where k nonempty clusters cannot exist).
    """
    pts_raw = _check_points(points)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = pts_raw.shape[0]
    if n < k:
        raise TooFewPointsError(f"{n} points cannot form {k} clusters")
    if np.unique(pts_raw, axis=0).shape[0] < k:
        raise DegenerateInputError(
            f"fewer than {k} distinct points; clusters would collapse")
    if init not in INIT_METHODS:
        raise ValueError(f"unknown init {init!r}; expected one of {INIT_METHODS}")

    scaling = None
    pts = pts_raw
    if scale:
        pts, scaling = scale_matrix(pts_raw, "min-max")

    rng = np.random.default_rng(seed)
    if init == "provided":
        if centroids is None:
            raise ValueError("init='provided' needs centroids")
        C = np.asarray(centroids, dtype=float).copy()
        if C.shape != (k, pts.shape[1]):
            raise ValueError(
                f"expected centroids of shape {(k, pts.shape[1])}, got {C.shape}")
        if scaling is not None:
            C = np.column_stack([scaling[j].apply(C[:, j])
                                 for j in range(C.shape[1])])
    elif init == "random":
        C = pts[rng.choice(n, size=k, replace=False)].copy()
    else:
        C = _init_kmeanspp(pts, k, rng)

    assignments = _assign_with_repair(pts, C)
    trace = [_wcss(pts, C, assignments)]
    converged = False
    iterations = 0
    for _ in range(max_iters):
        iterations += 1
        C_new = np.vstack([pts[assignments == j].mean(axis=0) for j in range(k)])
        new_assignments = _assign_with_repair(pts, C_new)
        trace.append(_wcss(pts, C_new, new_assignments))
        moved = float(np.sqrt(((C_new - C) ** 2).sum(axis=1)).max())
        C = C_new
        if np.array_equal(new_assignments, assignments):
            converged = True
            break
        assignments = new_assignments
        if moved < tol:
            converged = True
            break

    # land on a consistent state: centroids are exact member means
    C = np.vstack([pts[assignments == j].mean(axis=0) for j in range(k)])
    wcss = _wcss(pts, C, assignments)
    trace.append(wcss)

    return ClusterModel(k=k, centroids=C, assignments=assignments,
                        iterations_run=iterations, converged=converged,
                        wcss=wcss, feature_scaling=scaling, wcss_trace=trace,
                        init=init, seed=int(seed))


def assign(model: ClusterModel, point) -> int:
    """Nearest-centroid index for one point; ties to the lower index."""
    pt = np.asarray(point, dtype=float).reshape(1, -1)
    if not np.all(np.isfinite(pt)):
        raise NonFiniteInputError("point contains NaN or infinity")
    if model.feature_scaling is not None:
        pt = np.column_stack([
            model.feature_scaling[j].apply(pt[:, j])
            for j in range(pt.shape[1])])
    return int(np.argmin(_sq_distances(pt, model.centroids), axis=1)[0])


@dataclass(frozen=True)
class ClusterStat:
    cluster: int
    size: int
    mean_hdi: float
    mean_gdp: float
    hdi_category_of_mean: HdiCategory
    hdi_min: float
    hdi_max: float
    gdp_min: float
    gdp_max: float


@dataclass
class ClusterSummary:
    """Per-cluster statistics on unscaled values, sorted by mean HDI."""

    entries: list[ClusterStat]
    total: int

    def to_json(self) -> str:
        doc = {
            "total_points": self.total,
            "clusters": [
                {"cluster": e.cluster, "size": e.size,
                 "mean_hdi": e.mean_hdi, "mean_gdp": e.mean_gdp,
                 "hdi_category_of_mean": e.hdi_category_of_mean.label,
                 "hdi_range": [e.hdi_min, e.hdi_max],
                 "gdp_range": [e.gdp_min, e.gdp_max]}
                for e in self.entries
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def summarize(model: ClusterModel, points,
              thresholds: CategoryThresholds = DEFAULT_THRESHOLDS) -> ClusterSummary:
    """Sizes, means, ranges, and the HDI band of each cluster mean.

    ``points`` must be the raw (unscaled) rows the model was fitted on;
    statistics are always computed on unscaled values.
    """
    pts = _check_points(points)
    if pts.shape[0] != model.assignments.shape[0]:
        raise LengthMismatchError(
            f"{pts.shape[0]} points vs {model.assignments.shape[0]} assignments")
    entries = []
    for j in range(model.k):
        members = pts[model.assignments == j]
        mean_hdi = float(members[:, 0].mean())
        entries.append(ClusterStat(
            cluster=j, size=int(members.shape[0]),
            mean_hdi=mean_hdi, mean_gdp=float(members[:, 1].mean()),
            hdi_category_of_mean=categorize(mean_hdi, thresholds),
            hdi_min=float(members[:, 0].min()), hdi_max=float(members[:, 0].max()),
            gdp_min=float(members[:, 1].min()), gdp_max=float(members[:, 1].max()),
        ))
    entries.sort(key=lambda e: (e.mean_hdi, e.cluster))
    return ClusterSummary(entries=entries, total=int(pts.shape[0]))


@dataclass(frozen=True)
class OverlapPair:
    cluster_a: int
    cluster_b: int
    low: float
    high: float


def cluster_overlap_report(summary: ClusterSummary,
                           axis: str = "gdp") -> list[OverlapPair]:
    """Cluster pairs whose [min, max] ranges intersect on one axis."""
    if axis not in ("hdi", "gdp"):
        raise ValueError(f"axis must be 'hdi' or 'gdp', got {axis!r}")
    spans = [
        (e.cluster, e.hdi_min, e.hdi_max) if axis == "hdi"
        else (e.cluster, e.gdp_min, e.gdp_max)
        for e in summary.entries
    ]
    spans.sort(key=lambda s: s[0])
    overlaps = []
    for i in range(len(spans)):
        for j in range(i + 1, len(spans)):
            low = max(spans[i][1], spans[j][1])
            high = min(spans[i][2], spans[j][2])
            if low <= high:
                overlaps.append(OverlapPair(
                    cluster_a=spans[i][0], cluster_b=spans[j][0],
                    low=low, high=high))
    return overlaps


def overlaps_json(summary: ClusterSummary) -> str:
    doc = {
        axis: [
            {"clusters": [p.cluster_a, p.cluster_b],
             "interval": [p.low, p.high]}
            for p in cluster_overlap_report(summary, axis)
        ]
        for axis in ("hdi", "gdp")
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def assignments_csv(model: ClusterModel, region_ids, points) -> str:
    """Per-region rows: region,hdi,gdp,cluster (raw axis values)."""
    pts = _check_points(points)
    if len(region_ids) != pts.shape[0] or pts.shape[0] != len(model.assignments):
        raise LengthMismatchError("regions, points, and assignments differ in length")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["region", "hdi", "gdp", "cluster"])
    for region, row, cluster in zip(region_ids, pts, model.assignments):
        writer.writerow([region, repr(float(row[0])), repr(float(row[1])),
                         int(cluster)])
    return buf.getvalue()


def centroids_json(model: ClusterModel) -> str:
    """Centroid file (raw axis space); loadable as init='provided' input."""
    doc = {
        "format": CENTROIDS_MAGIC,
        "version": CENTROIDS_VERSION,
        "k": model.k,
        "centroids": [[float(v) for v in row]
                      for row in model.centroids_unscaled()],
        "wcss": model.wcss,
        "converged": model.converged,
        "iterations_run": model.iterations_run,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_centroids(source) -> np.ndarray:
    """Read a centroid file back into an array for init='provided'."""
    if isinstance(source, (str, os.PathLike)) and "\n" not in str(source):
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source.decode("utf-8") if isinstance(source, bytes) else str(source)
    doc = json.loads(text)
    if doc.get("format") != CENTROIDS_MAGIC or doc.get("version") != CENTROIDS_VERSION:
        raise ValueError("not a version-1 centroid document")
    return np.asarray(doc["centroids"], dtype=float)
