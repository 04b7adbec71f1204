"""Confusion matrices and classification metrics.

The matrix is always held internally as 4x4 over the fixed category
order (Low, Medium, High, VeryHigh), rows = actual, columns =
predicted, regardless of which categories appear in the data.  Display
order and empty-class elision are rendering concerns only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInputError, LengthMismatchError
from .features import _CATEGORY_LABELS, N_CATEGORIES

_LABEL_TO_INDEX = {label: i for i, label in enumerate(_CATEGORY_LABELS)}


@dataclass
class ConfusionMatrix:
    """4x4 count matrix; counts[i][j] = actual class i predicted as j."""

    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def correct(self) -> int:
        return int(np.trace(self.counts))

    def class_index(self, label: str) -> int:
        return _LABEL_TO_INDEX[label]


def confusion(actual, predicted) -> ConfusionMatrix:
    """Tally (actual, predicted) integer label pairs into a 4x4 matrix."""
    act = np.asarray(actual, dtype=int)
    pred = np.asarray(predicted, dtype=int)
    if act.shape != pred.shape:
        raise LengthMismatchError(
            f"{act.shape[0]} actual labels vs {pred.shape[0]} predictions")
    if act.size == 0:
        raise EmptyInputError("no label pairs to tally")
    if act.min() < 0 or act.max() >= N_CATEGORIES:
        raise ValueError("actual labels outside 0..3")
    if pred.min() < 0 or pred.max() >= N_CATEGORIES:
        raise ValueError("predicted labels outside 0..3")
    counts = np.zeros((N_CATEGORIES, N_CATEGORIES), dtype=int)
    np.add.at(counts, (act, pred), 1)
    return ConfusionMatrix(counts=counts)


def metrics(matrix: ConfusionMatrix) -> dict:
    """Accuracy, error percent, and per-class precision/recall.

    A 0/0 precision or recall is reported as 0.0 and flagged undefined
    so downstream consumers can tell it apart from a true zero.
    """
    counts = matrix.counts
    total = matrix.total
    accuracy = matrix.correct / total
    per_class = {}
    for i, label in enumerate(_CATEGORY_LABELS):
        tp = int(counts[i, i])
        row = int(counts[i, :].sum())      # actual occurrences
        col = int(counts[:, i].sum())      # predicted occurrences
        precision = tp / col if col else 0.0
        recall = tp / row if row else 0.0
        per_class[label] = {
            "precision": precision,
            "recall": recall,
            "precision_undefined": col == 0,
            "recall_undefined": row == 0,
            "support": row,
        }
    return {
        "total": total,
        "correct": matrix.correct,
        "accuracy": accuracy,
        "prediction_error_percent": 100.0 * (1.0 - accuracy),
        "per_class": per_class,
    }


def metrics_json(matrix: ConfusionMatrix) -> str:
    return json.dumps(metrics(matrix), indent=2, sort_keys=True) + "\n"


def render_text(matrix: ConfusionMatrix, display_order=None,
                elide_empty: bool = True) -> str:
    """Aligned text table plus a 2-decimal error-percent line.

    display_order lists category labels for rows/columns; the default
    is Low..VeryHigh.  With elide_empty, classes absent from both axes
    are dropped from the table (the counts still include them).
    """
    order = list(display_order) if display_order is not None else list(_CATEGORY_LABELS)
    for label in order:
        if label not in _LABEL_TO_INDEX:
            raise ValueError(f"unknown category label {label!r}")
    if len(set(order)) != len(order):
        raise ValueError("display_order repeats a label")
    counts = matrix.counts
    shown = order
    if elide_empty:
        shown = [lab for lab in order
                 if counts[_LABEL_TO_INDEX[lab], :].sum()
                 or counts[:, _LABEL_TO_INDEX[lab]].sum()]
        if not shown:
            shown = order
    idx = [_LABEL_TO_INDEX[lab] for lab in shown]
    sub = counts[np.ix_(idx, idx)]

    header_cells = ["actual\\predicted"] + shown
    widths = [len(header_cells[0])] + [
        max(len(lab), max(len(str(int(v))) for v in sub[:, j]))
        for j, lab in enumerate(shown)
    ]
    widths[0] = max(widths[0], max(len(lab) for lab in shown))
    lines = ["  ".join(cell.rjust(w) for cell, w in zip(header_cells, widths))]
    for i, lab in enumerate(shown):
        row = [lab.rjust(widths[0])] + [
            str(int(sub[i, j])).rjust(widths[j + 1]) for j in range(len(shown))]
        lines.append("  ".join(row))
    m = metrics(matrix)
    lines.append("")
    lines.append(f"total: {m['total']}  correct: {m['correct']}  "
                 f"prediction error: {m['prediction_error_percent']:.2f}%")
    return "\n".join(lines) + "\n"


def render_csv(matrix: ConfusionMatrix) -> str:
    """Full 4x4 grid as CSV, no elision; first column = actual label."""
    lines = ["actual," + ",".join(_CATEGORY_LABELS)]
    for i, label in enumerate(_CATEGORY_LABELS):
        lines.append(label + "," + ",".join(
            str(int(v)) for v in matrix.counts[i]))
    return "\n".join(lines) + "\n"


def cluster_assignment_check(model, points, reference) -> float:
    """Fraction of points whose nearest model centroid matches reference."""
    from .cluster import _check_points, assign

    pts = _check_points(points)
    ref = np.asarray(reference, dtype=int)
    if pts.shape[0] != ref.shape[0]:
        raise LengthMismatchError(
            f"{pts.shape[0]} points vs {ref.shape[0]} reference labels")
    if pts.shape[0] == 0:
        raise EmptyInputError("no points to check")
    hits = sum(1 for row, want in zip(pts, ref) if assign(model, row) == int(want))
    return hits / pts.shape[0]
