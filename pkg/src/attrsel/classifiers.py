"""One classifier per algorithm family behind a common train/predict contract."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from .data import Dataset
from .filters import BinningSpec, apply_cuts, equal_frequency_cuts
from .logistic import fit_softmax_batch, predict_proba_linear


@dataclass(frozen=True)
class LogisticRegression:
    ridge: float = 1e-8
    max_iter: int = 200
    tol: float = 1e-8
    name: ClassVar[str] = "logistic"

    def __post_init__(self):
        if self.ridge < 0 or self.max_iter < 1 or self.tol < 0:
            raise ValueError(f"invalid {self}")


@dataclass(frozen=True)
class GaussianNaiveBayes:
    var_floor: float = 1e-9
    name: ClassVar[str] = "naive_bayes"

    def __post_init__(self):
        if not self.var_floor > 0:
            raise ValueError("var_floor must be positive")


@dataclass(frozen=True)
class KNN:
    k: int = 1
    weight: str = "inverse-distance"
    name: ClassVar[str] = "knn"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.weight != "inverse-distance":
            raise ValueError(f"unsupported weighting {self.weight!r}")


@dataclass(frozen=True)
class DecisionTree:
    min_leaf: int = 2
    max_depth: int = 25
    name: ClassVar[str] = "tree"

    def __post_init__(self):
        if self.min_leaf < 1 or self.max_depth < 0:
            raise ValueError(f"invalid {self}")


@dataclass(frozen=True)
class OneRule:
    binning: BinningSpec = field(default_factory=BinningSpec)
    name: ClassVar[str] = "oner"


ClassifierSpec = LogisticRegression | GaussianNaiveBayes | KNN | DecisionTree | OneRule
SPEC_TYPES = {c.name: c for c in (LogisticRegression, GaussianNaiveBayes, KNN, DecisionTree, OneRule)}


def spec_label(spec) -> str:
    """Canonical text form, e.g. ``knn(k=10)``; parameters at their default are omitted."""
    default = type(spec)()
    args = []
    for f in spec.__dataclass_fields__:
        v = getattr(spec, f)
        if v != getattr(default, f):
            args.append(f"{f}={v.n_bins if isinstance(v, BinningSpec) else v}")
    return f"{spec.name}({', '.join(args)})" if args else spec.name


def parse_spec(text: str):
    """Inverse of :func:`spec_label`."""
    text = text.strip()
    name, _, rest = text.partition("(")
    name = name.strip()
    if name not in SPEC_TYPES:
        raise ValueError(f"unknown classifier {name!r}")
    cls = SPEC_TYPES[name]
    kwargs = {}
    rest = rest.rstrip(")").strip()
    if rest:
        for part in rest.split(","):
            key, _, val = part.partition("=")
            key, val = key.strip(), val.strip()
            if key not in cls.__dataclass_fields__:
                raise ValueError(f"{name}: unknown parameter {key!r}")
            if key == "binning":
                kwargs[key] = BinningSpec(int(val))
            elif key == "weight":
                kwargs[key] = val
            elif key in ("k", "max_iter", "min_leaf", "max_depth"):
                kwargs[key] = int(val)
            else:
                kwargs[key] = float(val)
    return cls(**kwargs)


class TrainedModel:
    """Base for fitted models; subclasses implement ``_proba`` on a feature matrix."""

    def __init__(self, spec, feature_names, n_classes):
        self.spec = spec
        self.feature_names = tuple(feature_names)
        self.n_classes = n_classes

    def predict_proba(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != len(self.feature_names):
            raise ValueError(f"expected {len(self.feature_names)} features, got {X.shape[1]}")
        if not np.isfinite(X).all():
            raise ValueError("non-finite input")
        return self._proba(X)

    def predict(self, X) -> np.ndarray:
        return self.predict_proba(X).argmax(axis=1)

    def _proba(self, X):
        raise NotImplementedError


class ConstantModel(TrainedModel):
    def __init__(self, spec, feature_names, n_classes, label):
        super().__init__(spec, feature_names, n_classes)
        self.label = int(label)

    def _proba(self, X):
        out = np.zeros((X.shape[0], self.n_classes))
        out[:, self.label] = 1.0
        return out


class LogisticModel(TrainedModel):
    def __init__(self, spec, feature_names, n_classes, weights, fit_info):
        super().__init__(spec, feature_names, n_classes)
        self.weights = weights
        self.fit_info = fit_info

    def _proba(self, X):
        return predict_proba_linear(self.weights, X)


class NaiveBayesModel(TrainedModel):
    def __init__(self, spec, feature_names, n_classes, means, variances, priors):
        super().__init__(spec, feature_names, n_classes)
        self.means, self.variances, self.priors = means, variances, priors

    def _proba(self, X):
        with np.errstate(divide="ignore"):
            log_prior = np.log(self.priors)
        ll = -0.5 * (np.log(2 * np.pi * self.variances)[None]
                     + (X[:, None, :] - self.means[None]) ** 2 / self.variances[None]).sum(axis=2)
        joint = ll + log_prior[None]
        joint -= joint.max(axis=1, keepdims=True)
        p = np.exp(joint)
        return p / p.sum(axis=1, keepdims=True)


class KNNModel(TrainedModel):
    def __init__(self, spec, feature_names, n_classes, X, y):
        super().__init__(spec, feature_names, n_classes)
        self.X, self.y = X, y

    def _proba(self, X):
        k = min(self.spec.k, self.X.shape[0])
        out = np.zeros((X.shape[0], self.n_classes))
        for i, row in enumerate(X):
            dist = np.sqrt(((self.X - row) ** 2).sum(axis=1))
            nearest = np.argsort(dist, kind="stable")[:k]
            dn = dist[nearest]
            if (dn == 0).any():
                nearest = nearest[dn == 0]
                w = np.ones(nearest.size)
            else:
                w = 1.0 / dn
            np.add.at(out[i], self.y[nearest], w)
            out[i] /= out[i].sum()
        return out


@dataclass
class _Node:
    dist: np.ndarray
    feature: int = -1
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def depth(self) -> int:
        return 0 if self.is_leaf else 1 + max(self.left.depth(), self.right.depth())


def _entropy_rows(counts: np.ndarray) -> np.ndarray:
    tot = counts.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(tot > 0, counts / tot, 0.0)
        h = -np.where(p > 0, p * np.log2(p), 0.0).sum(axis=-1)
    return h


def _best_split(X, y, n_classes, min_leaf):
    """(feature, threshold, gain) of the best binary split, or None."""
    n = y.shape[0]
    Y = np.eye(n_classes)[y]
    parent_h = _entropy_rows(Y.sum(axis=0))
    best = None
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        left = np.cumsum(Y[order], axis=0)[:-1]
        right = Y.sum(axis=0) - left
        n_left = np.arange(1, n)
        valid = (xs[1:] > xs[:-1]) & (n_left >= min_leaf) & (n - n_left >= min_leaf)
        if not valid.any():
            continue
        h = (n_left * _entropy_rows(left) + (n - n_left) * _entropy_rows(right)) / n
        gain = np.where(valid, parent_h - h, -np.inf)
        pos = int(np.argmax(gain))
        if best is None or gain[pos] > best[2]:
            best = (j, 0.5 * (xs[pos] + xs[pos + 1]), float(gain[pos]))
    return best


def _grow(X, y, n_classes, spec: DecisionTree, depth: int) -> _Node:
    counts = np.bincount(y, minlength=n_classes).astype(np.float64)
    node = _Node(counts / counts.sum())
    if (counts > 0).sum() <= 1 or depth >= spec.max_depth or y.size < 2 * spec.min_leaf:
        return node
    split = _best_split(X, y, n_classes, spec.min_leaf)
    if split is None:
        return node
    j, thr, _ = split
    go_left = X[:, j] <= thr
    node.feature, node.threshold = j, thr
    node.left = _grow(X[go_left], y[go_left], n_classes, spec, depth + 1)
    node.right = _grow(X[~go_left], y[~go_left], n_classes, spec, depth + 1)
    return node


class TreeModel(TrainedModel):
    def __init__(self, spec, feature_names, n_classes, root):
        super().__init__(spec, feature_names, n_classes)
        self.root = root

    @property
    def depth(self) -> int:
        return self.root.depth()

    def _proba(self, X):
        out = np.empty((X.shape[0], self.n_classes))
        for i, row in enumerate(X):
            node = self.root
            while not node.is_leaf:
                node = node.left if row[node.feature] <= node.threshold else node.right
            out[i] = node.dist
        return out


class OneRuleModel(TrainedModel):
    def __init__(self, spec, feature_names, n_classes, feature, cuts, table, fallback):
        super().__init__(spec, feature_names, n_classes)
        self.feature = feature
        self.cuts = cuts          # None for nominal codes
        self.table = table        # value -> class distribution
        self.fallback = fallback  # distribution for unseen values

    def _proba(self, X):
        col = X[:, self.feature]
        vals = apply_cuts(col, self.cuts) if self.cuts is not None else col.astype(np.int64)
        return np.array([self.table.get(int(v), self.fallback) for v in vals])


def _fit_oner(spec: OneRule, d: Dataset, X, y, K):
    best = None
    for j, c in enumerate(d.columns):
        cuts = None
        if c.kind == "nominal":
            vals = c.values
        elif c.values.min() == c.values.max():
            cuts, vals = np.empty(0), np.zeros(d.n_rows, dtype=np.int64)
        else:
            cuts = equal_frequency_cuts(c.values, spec.binning.n_bins)
            vals = apply_cuts(c.values, cuts)
        table = {}
        correct = 0
        for v in np.unique(vals):
            counts = np.bincount(y[vals == v], minlength=K).astype(np.float64)
            correct += counts.max()
            table[int(v)] = counts / counts.sum()
        if best is None or correct > best[0]:
            best = (correct, j, cuts, table)
    _, j, cuts, table = best
    fallback = np.bincount(y, minlength=K) / y.size
    return j, cuts, table, fallback


def train(spec, d: Dataset) -> TrainedModel:
    """Fit ``spec`` on every feature column of ``d``."""
    if d.n_rows == 0:
        raise ValueError("cannot train on an empty dataset")
    if d.n_features == 0:
        raise ValueError("cannot train without attributes")
    X, y, K = d.matrix(), d.labels, d.n_classes
    present = np.flatnonzero(np.bincount(y, minlength=K))
    if present.size == 1:
        return ConstantModel(spec, d.names, K, present[0])
    if isinstance(spec, LogisticRegression):
        fit = fit_softmax_batch(X, y, K, ridge=spec.ridge, max_iter=spec.max_iter, tol=spec.tol)
        return LogisticModel(spec, d.names, K, fit.weights[0],
                             {"loss": float(fit.loss[0]), "iterations": int(fit.iterations[0]),
                              "grad_norm": float(fit.grad_norm[0])})
    if isinstance(spec, GaussianNaiveBayes):
        means = np.zeros((K, X.shape[1]))
        variances = np.ones((K, X.shape[1]))
        priors = np.bincount(y, minlength=K) / y.size
        for c in present:
            Xc = X[y == c]
            means[c] = Xc.mean(axis=0)
            variances[c] = np.maximum(Xc.var(axis=0), spec.var_floor)
        return NaiveBayesModel(spec, d.names, K, means, variances, priors)
    if isinstance(spec, KNN):
        return KNNModel(spec, d.names, K, X.copy(), y.copy())
    if isinstance(spec, DecisionTree):
        return TreeModel(spec, d.names, K, _grow(X, y, K, spec, 0))
    if isinstance(spec, OneRule):
        return OneRuleModel(spec, d.names, K, *_fit_oner(spec, d, X, y, K))
    raise TypeError(f"unknown classifier spec {spec!r}")


def predict(model: TrainedModel, row) -> tuple[int, np.ndarray]:
    """Predicted class (ties to the lower index) and the class distribution for one row."""
    row = np.asarray(row, dtype=np.float64)
    if row.ndim != 1:
        raise ValueError("expected a single feature vector")
    dist = model.predict_proba(row)[0]
    return int(np.argmax(dist)), dist
