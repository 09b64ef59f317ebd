"""Fold planning and seed derivation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def derive_seed(*keys: int) -> int:
    """Deterministic 32-bit seed from a tuple of non-negative integers."""
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1)[0])


@dataclass(frozen=True, eq=False)
class FoldPlan:
    k: int
    assignments: np.ndarray
    seed: int
    stratified: bool

    def __post_init__(self):
        a = np.array(self.assignments, dtype=np.int64)
        a.setflags(write=False)
        object.__setattr__(self, "assignments", a)

    @property
    def n_rows(self) -> int:
        return int(self.assignments.shape[0])

    def test_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)

    def splits(self):
        for f in range(self.k):
            yield self.train_rows(f), self.test_rows(f)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.k)

    def __eq__(self, other):
        if not isinstance(other, FoldPlan):
            return NotImplemented
        return (self.k, self.seed, self.stratified) == (other.k, other.seed, other.stratified) and \
            np.array_equal(self.assignments, other.assignments)


def make_folds(labels, k: int, seed: int, stratified: bool = True) -> FoldPlan:
    """Random fold assignment; stratified plans deal each class round-robin.

    Rows are ordered by (class, random key) when stratified, then fold ``i mod k``
    is assigned along that order, which bounds both fold-size and per-class
    imbalance by one row.
    """
    labels = np.asarray(labels)
    n = labels.shape[0]
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of rows ({n})")
    rng = np.random.default_rng(seed)
    key = rng.permutation(n)
    order = np.lexsort((key, labels)) if stratified else np.argsort(key, kind="stable")
    assignments = np.empty(n, dtype=np.int64)
    assignments[order] = np.arange(n) % k
    return FoldPlan(k, assignments, int(seed), bool(stratified))
