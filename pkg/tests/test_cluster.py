"""Lloyd's K-means: fitting, invariants, summaries, serialization."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdikit.cluster import (assign, assignments_csv, centroids_json,
                            cluster_overlap_report, kmeans_fit,
                            load_centroids, overlaps_json, summarize)
from hdikit.errors import (DegenerateInputError, LengthMismatchError,
                           NonFiniteInputError, TooFewPointsError)
from hdikit.features import HdiCategory


def _blobs(k: int, per: int, seed: int = 0, spread: float = 0.5):
    rng = np.random.default_rng(seed)
    centers = np.array([[10.0 * j, 50.0 - 10.0 * j] for j in range(k)])
    pts = np.vstack([
        centers[j] + rng.uniform(-spread, spread, size=(per, 2))
        for j in range(k)])
    labels = np.repeat(np.arange(k), per)
    order = rng.permutation(len(labels))
    return pts[order], labels[order]


def _is_fixed_point(model, pts, tol=1e-9) -> bool:
    d = ((pts[:, None, :] - model.centroids[None, :, :]) ** 2).sum(axis=2)
    nearest_ok = np.all(
        d[np.arange(len(pts)), model.assignments] <= d.min(axis=1) + tol)
    means_ok = all(
        np.allclose(model.centroids[j],
                    pts[model.assignments == j].mean(axis=0), atol=tol)
        for j in range(model.k))
    return bool(nearest_ok and means_ok)


def test_separated_blobs_are_recovered():
    pts, labels = _blobs(3, 15)
    model = kmeans_fit(pts, 3, seed=0)
    assert model.converged
    assert _is_fixed_point(model, pts)
    # same-planted-cluster points land together
    for j in range(3):
        got = model.assignments[labels == j]
        assert len(set(got.tolist())) == 1


def test_each_point_its_own_cluster():
    pts = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0], [10.0, 10.0]])
    model = kmeans_fit(pts, 4, seed=1)
    assert sorted(np.bincount(model.assignments).tolist()) == [1, 1, 1, 1]
    assert model.wcss == pytest.approx(0.0, abs=1e-18)


def test_k1_centroid_is_the_mean():
    pts, _ = _blobs(2, 10, seed=3)
    model = kmeans_fit(pts, 1, seed=0)
    assert np.allclose(model.centroids[0], pts.mean(axis=0))
    assert model.converged


def test_wcss_trace_never_increases_on_clean_instances():
    pts, _ = _blobs(4, 25, seed=5, spread=3.0)
    model = kmeans_fit(pts, 4, seed=5)
    trace = model.wcss_trace
    assert all(b <= a + 1e-9 for a, b in zip(trace, trace[1:]))
    assert model.wcss == trace[-1]


def test_input_validation():
    with pytest.raises(TooFewPointsError):
        kmeans_fit([[0.0, 0.0], [1.0, 1.0]], 3)
    with pytest.raises(DegenerateInputError):
        kmeans_fit([[1.0, 1.0], [1.0, 1.0], [2.0, 2.0]], 3)
    with pytest.raises(NonFiniteInputError):
        kmeans_fit([[0.0, float("nan")], [1.0, 1.0]], 2)
    with pytest.raises(ValueError):
        kmeans_fit([[0.0, 0.0], [1.0, 1.0]], 2, init="psychic")
    with pytest.raises(ValueError):
        kmeans_fit([[0.0, 0.0], [1.0, 1.0]], 0)


def test_kmeanspp_is_seeded_and_row_order_invariant():
    pts, _ = _blobs(3, 12, seed=7)
    a = kmeans_fit(pts, 3, init="kmeanspp", seed=9)
    b = kmeans_fit(pts, 3, init="kmeanspp", seed=9)
    assert np.array_equal(a.centroids, b.centroids)
    assert np.array_equal(a.assignments, b.assignments)

    rng = np.random.default_rng(1)
    perm = rng.permutation(len(pts))
    c = kmeans_fit(pts[perm], 3, init="kmeanspp", seed=9)
    # same centroid set and same partition of the point multiset
    assert np.allclose(np.sort(a.centroids, axis=0),
                       np.sort(c.centroids, axis=0))

    def partition(points, assignments, k):
        return {frozenset(map(tuple, points[assignments == j]))
                for j in range(k)}

    assert partition(pts, a.assignments, 3) == \
        partition(pts[perm], c.assignments, 3)


def test_random_init_is_seeded():
    pts, _ = _blobs(2, 10, seed=2)
    a = kmeans_fit(pts, 2, init="random", seed=4)
    b = kmeans_fit(pts, 2, init="random", seed=4)
    assert np.array_equal(a.centroids, b.centroids)
    assert _is_fixed_point(a, pts)


def test_provided_init_and_centroid_round_trip(tmp_path):
    pts, _ = _blobs(2, 8, seed=6)
    starts = np.array([[0.0, 50.0], [10.0, 40.0]])
    a = kmeans_fit(pts, 2, init="provided", centroids=starts)
    text = centroids_json(a)
    path = tmp_path / "c.json"
    path.write_text(text, encoding="utf-8")
    again = load_centroids(path)
    b = kmeans_fit(pts, 2, init="provided", centroids=again)
    assert np.array_equal(a.centroids, b.centroids)
    doc = json.loads(text)
    assert doc["format"] == "hdikit-centroids" and doc["k"] == 2
    with pytest.raises(ValueError):
        kmeans_fit(pts, 2, init="provided")  # centroids missing
    with pytest.raises(ValueError):
        kmeans_fit(pts, 2, init="provided", centroids=starts[:1])
    with pytest.raises(ValueError):
        load_centroids('{"format": "other", "version": 1}\n')


def test_empty_cluster_repair_keeps_k_clusters():
    pts = np.array([[0.0, 0.0], [0.1, 0.0], [0.2, 0.1],
                    [5.0, 5.0], [5.1, 5.0], [5.2, 5.1]])
    # one starting centroid far away from every point: first assignment
    # leaves it empty and the repair must donate a point
    starts = np.array([[0.1, 0.05], [5.1, 5.05], [1e6, 1e6]])
    model = kmeans_fit(pts, 3, init="provided", centroids=starts)
    assert np.bincount(model.assignments, minlength=3).min() >= 1
    assert len(set(model.assignments.tolist())) == 3


def test_scaled_fit_records_scaling_and_inverts_centroids():
    pts, _ = _blobs(2, 10, seed=8)
    model = kmeans_fit(pts, 2, seed=1, scale=True)
    assert model.feature_scaling is not None
    uns = model.centroids_unscaled()
    for j in range(2):
        members = pts[model.assignments == j]
        assert np.allclose(uns[j], members.mean(axis=0), atol=1e-9)
    plain = kmeans_fit(pts, 2, seed=1)
    assert plain.feature_scaling is None


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**16), st.integers(2, 4), st.integers(8, 30))
def test_fit_reaches_a_lloyd_fixed_point(seed, k, n):
    rng = np.random.default_rng(seed)
    pts = np.round(rng.uniform(0.0, 100.0, size=(n, 2)), 3)
    if np.unique(pts, axis=0).shape[0] < k:
        return
    model = kmeans_fit(pts, k, seed=seed)
    if model.converged:
        assert _is_fixed_point(model, pts)
    assert np.bincount(model.assignments, minlength=k).min() >= 1


def test_assign_nearest_and_tie_to_lower_index():
    pts = np.array([[0.0, 0.0], [0.0, 1.0], [4.0, 0.0], [4.0, 1.0]])
    model = kmeans_fit(pts, 2, init="provided",
                       centroids=np.array([[0.0, 0.5], [4.0, 0.5]]))
    assert assign(model, [0.5, 0.5]) == int(model.assignments[0])
    # exactly halfway between both centroids: lower index wins
    assert assign(model, [2.0, 0.5]) == 0
    with pytest.raises(NonFiniteInputError):
        assign(model, [0.0, float("inf")])


def test_summarize_hand_case():
    pts = np.array([[55.0, 30.0], [57.0, 34.0],   # low blob
                    [75.0, 60.0], [77.0, 64.0]])  # high blob
    model = kmeans_fit(pts, 2, init="provided",
                       centroids=np.array([[76.0, 62.0], [56.0, 32.0]]))
    summary = summarize(model, pts)
    assert summary.total == 4
    assert [e.size for e in summary.entries] == [2, 2]
    first, second = summary.entries  # sorted by mean HDI ascending
    assert first.mean_hdi == 56.0 and second.mean_hdi == 76.0
    assert first.hdi_category_of_mean is HdiCategory.LOW
    assert second.hdi_category_of_mean is HdiCategory.HIGH
    assert first.gdp_min == 30.0 and first.gdp_max == 34.0
    # original cluster ids are preserved, not renumbered
    assert {e.cluster for e in summary.entries} == {0, 1}
    with pytest.raises(LengthMismatchError):
        summarize(model, pts[:3])


def test_overlap_report_closed_intervals():
    pts = np.array([[50.0, 10.0], [55.0, 30.0],
                    [70.0, 25.0], [75.0, 45.0]])
    model = kmeans_fit(pts, 2, init="provided",
                       centroids=np.array([[52.0, 20.0], [72.0, 35.0]]))
    summary = summarize(model, pts)
    gdp = cluster_overlap_report(summary, axis="gdp")
    assert len(gdp) == 1
    assert (gdp[0].low, gdp[0].high) == (25.0, 30.0)
    hdi = cluster_overlap_report(summary, axis="hdi")
    assert hdi == []  # HDI ranges [50,55] and [70,75] are disjoint
    doc = json.loads(overlaps_json(summary))
    assert doc["gdp"][0]["interval"] == [25.0, 30.0]
    assert doc["hdi"] == []
    with pytest.raises(ValueError):
        cluster_overlap_report(summary, axis="npp")


def test_assignments_csv_shape():
    pts = np.array([[55.0, 30.0], [75.0, 60.0]])
    model = kmeans_fit(pts, 2, seed=0)
    text = assignments_csv(model, ["A, Kota", "B"], pts)
    lines = text.splitlines()
    assert lines[0] == "region,hdi,gdp,cluster"
    assert lines[1].startswith('"A, Kota",55.0,30.0,')
    with pytest.raises(LengthMismatchError):
        assignments_csv(model, ["A"], pts)


def test_fit_is_deterministic_end_to_end():
    pts, _ = _blobs(4, 20, seed=12, spread=2.0)
    a = kmeans_fit(pts, 4, seed=3)
    b = kmeans_fit(pts, 4, seed=3)
    assert np.array_equal(a.centroids, b.centroids)
    assert np.array_equal(a.assignments, b.assignments)
    assert a.wcss_trace == b.wcss_trace
    assert centroids_json(a) == centroids_json(b)
