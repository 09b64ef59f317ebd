"""Cross-validated classification metrics and subset comparison tables."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .classifiers import spec_label, train
from .data import Dataset
from .folds import FoldPlan


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """Counts indexed ``[true, predicted]``."""

    counts: np.ndarray

    def __post_init__(self):
        c = np.array(self.counts, dtype=np.int64)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or (c < 0).any():
            raise ValueError("confusion matrix must be square and non-negative")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.counts + other.counts)

    def __eq__(self, other):
        return isinstance(other, ConfusionMatrix) and np.array_equal(self.counts, other.counts)


def confusion_matrix(predictions: Sequence[int], truths: Sequence[int], n_classes: int | None = None) -> ConfusionMatrix:
    predictions = np.asarray(predictions, dtype=np.int64)
    truths = np.asarray(truths, dtype=np.int64)
    if predictions.shape != truths.shape:
        raise ValueError("predictions and truths differ in length")
    if predictions.size == 0:
        raise ValueError("nothing to count")
    if n_classes is None:
        n_classes = int(max(predictions.max(), truths.max())) + 1
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (truths, predictions), 1)
    return ConfusionMatrix(counts)


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: tuple[float, ...]
    recall: tuple[float, ...]
    f1: tuple[float, ...]
    support: tuple[int, ...]
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "weighted_precision": self.weighted_precision,
            "weighted_recall": self.weighted_recall,
            "weighted_f1": self.weighted_f1,
            "precision": list(self.precision),
            "recall": list(self.recall),
            "f1": list(self.f1),
            "support": list(self.support),
        }


def weighted_metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Per-class and support-weighted precision/recall/F1; empty denominators give 0."""
    c = cm.counts.astype(np.float64)
    total = c.sum()
    if total <= 0:
        raise ValueError("empty confusion matrix")
    tp = np.diag(c)
    support = c.sum(axis=1)
    predicted = c.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(predicted > 0, tp / predicted, 0.0)
        recall = np.where(support > 0, tp / support, 0.0)
        denom = precision + recall
        f1 = np.where(denom > 0, 2 * precision * recall / denom, 0.0)
    w = support / total
    # support-weighted recall reduces to trace/total; computing it that way keeps the identity exact
    accuracy = float(tp.sum() / total)
    return MetricsReport(
        accuracy=accuracy,
        precision=tuple(float(v) for v in precision),
        recall=tuple(float(v) for v in recall),
        f1=tuple(float(v) for v in f1),
        support=tuple(int(v) for v in support),
        weighted_precision=float((w * precision).sum()),
        weighted_recall=accuracy,
        weighted_f1=float((w * f1).sum()),
    )


def weighted_recall_direct(cm: ConfusionMatrix) -> float:
    """Support-weighted recall evaluated term by term (for cross-checking)."""
    c = cm.counts.astype(np.float64)
    support = c.sum(axis=1)
    total = c.sum()
    terms = [support[i] / total * (c[i, i] / support[i]) for i in range(len(support)) if support[i] > 0]
    return float(sum(terms))


def cross_validate(spec, d: Dataset, plan: FoldPlan, prepare=None) -> tuple[MetricsReport, ConfusionMatrix]:
    """Pool out-of-fold predictions of ``spec`` into one confusion matrix.

    ``prepare(train, test)`` may transform each split before fitting (for
    example fold-local standardization).
    """
    if plan.n_rows != d.n_rows:
        raise ValueError("fold plan does not match the dataset")
    pred = np.empty(d.n_rows, dtype=np.int64)
    for train_rows, test_rows in plan.splits():
        if train_rows.size == 0:
            raise ValueError("empty training fold")
        if test_rows.size == 0:
            continue
        tr, te = d.take(train_rows), d.take(test_rows)
        if prepare is not None:
            tr, te = prepare(tr, te)
        model = train(spec, tr)
        pred[test_rows] = model.predict(te.matrix())
    cm = confusion_matrix(pred, d.labels, d.n_classes)
    return weighted_metrics(cm), cm


@dataclass(frozen=True)
class ComparisonRow:
    subset: str
    n_attributes: int
    algorithm: str
    metrics: MetricsReport

    def as_dict(self) -> dict:
        m = self.metrics
        return {"subset": self.subset, "n": self.n_attributes, "algorithm": self.algorithm,
                "accuracy": m.accuracy, "precision": m.weighted_precision,
                "recall": m.weighted_recall, "f_measure": m.weighted_f1}


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple[ComparisonRow, ...]

    def ranking(self) -> tuple[ComparisonRow, ...]:
        """Rows ordered by weighted F1, then accuracy, both descending (stable otherwise)."""
        return tuple(sorted(self.rows, key=lambda r: (-r.metrics.weighted_f1, -r.metrics.accuracy)))

    def chart_data(self) -> list[tuple[str, float, float]]:
        return [(f"{r.algorithm} [{r.subset}]", r.metrics.accuracy, r.metrics.weighted_f1) for r in self.rows]


def compare_subsets(d: Dataset, subsets: Mapping[str, Sequence[str]], specs: Sequence, plan: FoldPlan,
                    prepare=None) -> ComparisonTable:
    """Cross-validate every (attribute subset, classifier) pair on the same fold plan."""
    rows = []
    for name, attrs in subsets.items():
        attrs = list(attrs)
        if not attrs:
            raise ValueError(f"subset {name!r} is empty")
        sub = d.select_attributes(attrs)
        for spec in specs:
            report, _ = cross_validate(spec, sub, plan, prepare)
            rows.append(ComparisonRow(name, len(set(attrs)), spec_label(spec), report))
    return ComparisonTable(tuple(rows))
