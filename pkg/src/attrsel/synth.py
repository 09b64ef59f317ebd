"""Synthetic data with planted informative attributes."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .data import INCOME_CLASS_NAMES, Column, Dataset

# representative incomes that discretize back to class 0..3
CLASS_INCOME = (12_500.0, 31_250.0, 43_750.0, 62_500.0)


def synth_generate(n_rows: int, n_informative: int, n_noise: int, class_count: int = 4,
                   seed: int = 0, *, spread: float = 0.5, gap: float = 0.2) -> Dataset:
    """Draw a dataset whose class is recoverable only from the informative columns jointly.

    Each row gets a latent score inside its class interval ``[c + gap/2, c + 1 - gap/2)``.
    The informative columns share that score equally and add zero-sum Gaussian
    jitter (sd ``spread``), so their sum reproduces the score exactly while any
    proper subset of them leaves class boundaries blurred. Class-conditional means
    of every informative column are therefore pairwise separated. Noise columns
    are standard normal and class independent. Column positions are shuffled;
    the planted names are kept in ``provenance["informative"]``.
    """
    if class_count not in (2, 3, 4):
        raise ValueError("class_count must be 2, 3 or 4")
    if n_informative < 1 or n_noise < 0 or n_rows < class_count:
        raise ValueError("invalid counts")
    if not 0 <= gap < 1:
        raise ValueError("gap must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, class_count, n_rows)
    score = labels + gap / 2 + (1 - gap) * rng.random(n_rows)
    jitter = spread * rng.standard_normal((n_rows, n_informative))
    jitter -= jitter.mean(axis=1, keepdims=True)
    informative = score[:, None] / n_informative + jitter
    noise = rng.standard_normal((n_rows, n_noise))

    d = n_informative + n_noise
    slots = rng.permutation(d)
    X = np.empty((n_rows, d))
    X[:, slots[:n_informative]] = informative
    X[:, slots[n_informative:]] = noise
    names = [f"x{i:02d}" for i in range(d)]
    planted = tuple(names[i] for i in sorted(slots[:n_informative]))
    class_names = INCOME_CLASS_NAMES if class_count == 4 else tuple(f"c{i}" for i in range(class_count))
    cols = tuple(Column(n, "numeric", X[:, i]) for i, n in enumerate(names))
    return Dataset(cols, labels, class_names, provenance={
        "generator": "synth_generate", "seed": int(seed), "informative": planted,
        "noise": tuple(n for n in names if n not in planted)})


def write_synth_csv(d: Dataset, path: str | Path, target: str = "income") -> None:
    """Write a synthetic dataset as CSV with a representative income per class."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*d.names, target])
        X = d.matrix()
        for row, y in zip(X, d.labels):
            w.writerow([repr(float(v)) for v in row] + [repr(CLASS_INCOME[y])])
