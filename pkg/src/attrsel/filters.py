"""Single-attribute filter scorers and attribute ranking."""
from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass

import numpy as np

from .data import Dataset


class FilterMethod(enum.Enum):
    OneR = "oner"
    Relief = "relief"
    ChiSquare = "chi_square"
    GainRatio = "gain_ratio"
    InfoGain = "info_gain"


@dataclass(frozen=True)
class BinningSpec:
    n_bins: int = 10
    strategy: str = "equal-frequency"

    def __post_init__(self):
        if self.n_bins < 2:
            raise ValueError("n_bins must be >= 2")
        if self.strategy != "equal-frequency":
            raise ValueError(f"unsupported binning strategy {self.strategy!r}")


def equal_frequency_cuts(column, n_bins: int) -> np.ndarray:
    """Cut points for equal-frequency binning; a value equal to a cut goes below it."""
    v = np.sort(np.asarray(column, dtype=np.float64))
    n = v.shape[0]
    if n == 0 or v[0] == v[-1]:
        raise ValueError("cannot bin a constant column")
    pos = (np.arange(1, n_bins) * n) // n_bins - 1
    cuts = np.unique(v[pos[pos >= 0]])
    return cuts[cuts < v[-1]]


def apply_cuts(column, cuts: np.ndarray) -> np.ndarray:
    return np.searchsorted(cuts, np.asarray(column, dtype=np.float64), side="left")


def bin_numeric(column, spec: BinningSpec = BinningSpec()) -> np.ndarray:
    """Equal-frequency bin index per value (fewer than ``n_bins`` bins when ties collapse cuts)."""
    return apply_cuts(column, equal_frequency_cuts(column, spec.n_bins))


def _codes(a) -> np.ndarray:
    return np.unique(np.asarray(a), return_inverse=True)[1].ravel()


def _contingency(attr, labels) -> np.ndarray:
    a, c = _codes(attr), _codes(labels)
    table = np.zeros((a.max() + 1, c.max() + 1))
    np.add.at(table, (a, c), 1)
    return table


def _entropy(counts) -> float:
    counts = np.asarray(counts, dtype=np.float64)
    counts = counts[counts > 0]
    p = counts / counts.sum()
    return float(-(p * np.log2(p)).sum())


def _conditional_entropy(table) -> float:
    n = table.sum()
    return sum(row.sum() / n * _entropy(row) for row in table if row.sum() > 0)


def info_gain(attr, labels) -> float:
    """H(class) - H(class | attr) in bits."""
    table = _contingency(attr, labels)
    return max(_entropy(table.sum(axis=0)) - _conditional_entropy(table), 0.0)


def gain_ratio(attr, labels) -> float:
    table = _contingency(attr, labels)
    h_attr = _entropy(table.sum(axis=1))
    if h_attr <= 0:
        return 0.0
    ig = max(_entropy(table.sum(axis=0)) - _conditional_entropy(table), 0.0)
    return min(ig / h_attr, 1.0)


def chi_square(attr, labels) -> float:
    """Pearson chi-square statistic of the attr x class contingency table."""
    table = _contingency(attr, labels)
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / table.sum()
    ok = expected > 0
    return float((((table - expected) ** 2)[ok] / expected[ok]).sum())


def oner_rule(attr, labels) -> dict:
    """Map each attribute value to its majority class (ties to the lower class index)."""
    attr, labels = np.asarray(attr), np.asarray(labels)
    rule = {}
    for v in np.unique(attr):
        counts = np.bincount(labels[attr == v])
        rule[v.item()] = int(np.argmax(counts))
    return rule


def oner_merit(attr, labels) -> float:
    """Training accuracy of the one-rule built on ``attr``."""
    table = _contingency(attr, labels)
    return float(table.max(axis=1).sum() / table.sum())


def relief_weights(d: Dataset, k: int = 10) -> np.ndarray:
    """ReliefF weights using every instance as a probe.

    Neighbours are found by Euclidean distance over numeric values plus 0/1
    mismatch on nominal codes (ties to the lower row index). Numeric diffs are
    scaled by the column range. Miss groups are weighted by their class prior
    renormalised over the non-probe classes. Each neighbour group is averaged
    over the neighbours actually found (``k`` unless the class is smaller).
    """
    X = d.matrix()
    y = d.labels
    n, p = X.shape
    present = np.flatnonzero(np.bincount(y, minlength=d.n_classes))
    if n < 2 or present.size < 2:
        raise ValueError("ReliefF needs at least two rows and two classes")
    nominal = d.nominal_mask()
    span = X.max(axis=0) - X.min(axis=0)
    scale = np.where(span > 0, span, np.inf)
    num, nom = X[:, ~nominal], X[:, nominal]
    prior = np.bincount(y, minlength=d.n_classes) / n

    w = np.zeros(p)
    for i in range(n):
        dist = ((num - num[i]) ** 2).sum(axis=1) + (nom != nom[i]).sum(axis=1)
        order = np.argsort(dist, kind="stable")
        order = order[order != i]
        ranked_labels = y[order]
        for c in present:
            nearest = order[ranked_labels == c][:k]
            if nearest.size == 0:
                continue
            diff = np.abs(X[nearest] - X[i]) / scale
            diff[:, nominal] = X[nearest][:, nominal] != X[i, nominal]
            contrib = diff.mean(axis=0)
            if c == y[i]:
                w -= contrib
            else:
                w += prior[c] / (1.0 - prior[y[i]]) * contrib
    return w / n


@dataclass(frozen=True)
class RankEntry:
    attribute: str
    merit: float
    rank: int


@dataclass(frozen=True)
class RankedList:
    method: FilterMethod
    entries: tuple[RankEntry, ...]

    def rank_of(self, attribute: str) -> int:
        for e in self.entries:
            if e.attribute == attribute:
                return e.rank
        raise KeyError(attribute)

    def top(self, k: int) -> tuple[str, ...]:
        return tuple(e.attribute for e in self.entries[:k])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["method", "attribute", "merit", "rank"])
        for e in self.entries:
            w.writerow([self.method.value, e.attribute, f"{e.merit:.6g}", e.rank])
        return buf.getvalue()


_DISCRETE_SCORERS = {
    FilterMethod.OneR: oner_merit,
    FilterMethod.ChiSquare: chi_square,
    FilterMethod.GainRatio: gain_ratio,
    FilterMethod.InfoGain: info_gain,
}


def discretize_column(values, kind: str, binning: BinningSpec) -> np.ndarray:
    if kind == "nominal":
        return np.asarray(values)
    values = np.asarray(values)
    if values.size == 0 or values.min() == values.max():
        return np.zeros(values.shape[0], dtype=np.int64)
    return bin_numeric(values, binning)


def feature_merits(d: Dataset, method: FilterMethod, binning: BinningSpec = BinningSpec()) -> np.ndarray:
    """Merit of every feature column of ``d``."""
    if method is FilterMethod.Relief:
        return relief_weights(d)
    scorer = _DISCRETE_SCORERS[method]
    return np.array([scorer(discretize_column(c.values, c.kind, binning), d.labels) for c in d.columns])


def rank_attributes(d: Dataset, method: FilterMethod, binning: BinningSpec = BinningSpec()) -> RankedList:
    """Order attributes by merit, descending; ties go to the earlier attribute.

    Indicator columns produced by one-hot encoding are folded into their parent
    attribute, which takes the best merit among them.
    """
    merits = feature_merits(d, method, binning)
    best: dict[str, float] = {}
    for attr, m in zip(d.feature_attributes, merits):
        best[attr] = max(best.get(attr, -np.inf), float(m))
    names = list(best)
    vals = [best[a] for a in names]
    order = sorted(range(len(names)), key=lambda i: (-vals[i], i))
    entries = tuple(RankEntry(names[i], best[names[i]], r + 1) for r, i in enumerate(order))
    return RankedList(method, entries)
