"""Tabular cohort data: schema, ingestion and preprocessing."""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

ROLES = ("numeric", "nominal", "target", "ignored")
GROUPS = ("school", "admission", "cost", "student", "family")
DEFAULT_MISSING = frozenset({"", "NULL", "PrivacySuppressed"})


class DataError(ValueError):
    """Raised for unreadable or malformed input data."""


class IncomeClass(enum.IntEnum):
    VeryLow = 0
    Low = 1
    Middle = 2
    High = 3


INCOME_CLASS_NAMES = tuple(c.name for c in IncomeClass)
# lower edges of Low, Middle, High in USD/year
INCOME_CUTS = (25_000.0, 37_500.0, 50_000.0)


def discretize_income(mean_income: float) -> IncomeClass:
    """Map a mean yearly income to its class using half-open intervals [lo, hi)."""
    x = float(mean_income)
    if not math.isfinite(x) or x < 0:
        raise ValueError(f"income must be finite and non-negative, got {mean_income!r}")
    k = 0
    for cut in INCOME_CUTS:
        if x >= cut:
            k += 1
    return IncomeClass(k)


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    role: str
    group: str | None = None

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"column {self.name!r}: unknown role {self.role!r}")
        if self.group is not None and self.group not in GROUPS:
            raise ValueError(f"column {self.name!r}: unknown group {self.group!r}")


@dataclass(frozen=True)
class AttributeSchema:
    columns: tuple[ColumnSpec, ...]
    missing_tokens: frozenset[str] = DEFAULT_MISSING

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "missing_tokens", frozenset(self.missing_tokens))
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise ValueError("duplicate column names in schema")
        n_target = sum(c.role == "target" for c in self.columns)
        if n_target != 1:
            raise ValueError(f"schema needs exactly one target column, found {n_target}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    @property
    def target(self) -> str:
        return next(c.name for c in self.columns if c.role == "target")

    @property
    def attributes(self) -> tuple[ColumnSpec, ...]:
        return tuple(c for c in self.columns if c.role in ("numeric", "nominal"))

    def __getitem__(self, name: str) -> ColumnSpec:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    @classmethod
    def from_roles(cls, roles: Mapping[str, str], **kw) -> "AttributeSchema":
        """Build from ``{name: role}`` or ``{name: "role,group"}``."""
        cols = []
        for name, spec in roles.items():
            role, _, group = spec.partition(",")
            cols.append(ColumnSpec(name, role.strip(), group.strip() or None))
        return cls(tuple(cols), **kw)


@dataclass(frozen=True)
class Column:
    """One attribute column. Nominal values are category codes."""

    name: str
    kind: str
    values: np.ndarray
    categories: tuple[str, ...] = ()
    parent: str | None = None
    group: str | None = None

    @property
    def attribute(self) -> str:
        """Attribute identity used for vote bookkeeping."""
        return self.parent or self.name


def _frozen(a: np.ndarray, dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable column-oriented table plus integer class labels."""

    columns: tuple[Column, ...]
    labels: np.ndarray
    class_names: tuple[str, ...] = INCOME_CLASS_NAMES
    schema: AttributeSchema | None = None
    provenance: Mapping = field(default_factory=dict)

    def __post_init__(self):
        labels = _frozen(self.labels, np.int64)
        object.__setattr__(self, "labels", labels)
        cols = []
        for c in self.columns:
            dtype = np.float64 if c.kind == "numeric" else np.int64
            v = _frozen(c.values, dtype)
            if v.shape != labels.shape:
                raise ValueError(f"column {c.name!r} has {v.shape[0]} rows, expected {labels.shape[0]}")
            cols.append(replace(c, values=v))
        object.__setattr__(self, "columns", tuple(cols))
        names = self.names
        if len(set(names)) != len(names):
            raise ValueError("duplicate column names")
        if labels.size and (labels.min() < 0 or labels.max() >= len(self.class_names)):
            raise ValueError("label index out of range")

    @property
    def n_rows(self) -> int:
        return int(self.labels.shape[0])

    @property
    def n_features(self) -> int:
        return len(self.columns)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    @property
    def attributes(self) -> tuple[str, ...]:
        """Distinct parent attributes in column order."""
        return tuple(dict.fromkeys(c.attribute for c in self.columns))

    @property
    def feature_attributes(self) -> tuple[str, ...]:
        return tuple(c.attribute for c in self.columns)

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    def matrix(self) -> np.ndarray:
        """Feature matrix (rows x columns); nominal columns contribute their codes."""
        if not self.columns:
            return np.zeros((self.n_rows, 0))
        return np.column_stack([c.values.astype(np.float64) for c in self.columns])

    def nominal_mask(self) -> np.ndarray:
        return np.array([c.kind == "nominal" for c in self.columns], dtype=bool)

    def take(self, rows) -> "Dataset":
        rows = np.asarray(rows)
        cols = tuple(replace(c, values=c.values[rows]) for c in self.columns)
        return replace(self, columns=cols, labels=self.labels[rows])

    def select(self, features: Iterable[int | str]) -> "Dataset":
        """Restrict to the given feature columns (indices or names), keeping order given."""
        idx = []
        for f in features:
            idx.append(self.names.index(f) if isinstance(f, str) else int(f))
        return replace(self, columns=tuple(self.columns[i] for i in idx))

    def select_attributes(self, attributes: Iterable[str]) -> "Dataset":
        """Restrict to all columns whose parent attribute is listed."""
        keep = set(attributes)
        unknown = keep - set(self.attributes)
        if unknown:
            raise KeyError(f"unknown attributes: {sorted(unknown)}")
        return replace(self, columns=tuple(c for c in self.columns if c.attribute in keep))

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def equals(self, other: "Dataset") -> bool:
        if self.names != other.names or self.class_names != other.class_names:
            return False
        if not np.array_equal(self.labels, other.labels):
            return False
        for a, b in zip(self.columns, other.columns):
            if (a.kind, a.categories, a.parent) != (b.kind, b.categories, b.parent):
                return False
            if a.values.tobytes() != b.values.tobytes():
                return False
        return True


def load_csv(path: str | Path, schema: AttributeSchema) -> Dataset:
    """Read a CSV described by ``schema``; rows with missing tokens are dropped."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            records = list(reader)
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if header is None:
        raise DataError(f"{path}: empty file")
    header = [h.strip() for h in header]
    missing_cols = [n for n in schema.names if n not in header]
    extra_cols = [h for h in header if h not in schema.names]
    if missing_cols or extra_cols:
        raise DataError(f"{path}: header mismatch (missing {missing_cols}, uncovered {extra_cols})")
    pos = {h: i for i, h in enumerate(header)}
    used = [c for c in schema.columns if c.role != "ignored"]

    kept = []
    for lineno, rec in enumerate(records, start=2):
        if not rec:
            continue
        if len(rec) != len(header):
            raise DataError(f"{path}:{lineno}: expected {len(header)} fields, got {len(rec)}")
        if any(rec[pos[c.name]].strip() in schema.missing_tokens for c in used):
            continue
        kept.append((lineno, rec))
    if not kept:
        raise DataError(f"{path}: no rows left after dropping missing values")

    def as_float(tok: str, name: str, lineno: int) -> float:
        try:
            v = float(tok)
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-numeric value {tok!r} in column {name!r}") from None
        if not math.isfinite(v):
            raise DataError(f"{path}:{lineno}: non-finite value in column {name!r}")
        return v

    columns = []
    for spec in schema.attributes:
        i = pos[spec.name]
        if spec.role == "numeric":
            vals = [as_float(rec[i].strip(), spec.name, ln) for ln, rec in kept]
            columns.append(Column(spec.name, "numeric", np.array(vals), group=spec.group))
        else:
            cats: dict[str, int] = {}
            codes = [cats.setdefault(rec[i].strip(), len(cats)) for _, rec in kept]
            columns.append(Column(spec.name, "nominal", np.array(codes), tuple(cats), group=spec.group))

    ti = pos[schema.target]
    labels = []
    for ln, rec in kept:
        income = as_float(rec[ti].strip(), schema.target, ln)
        try:
            labels.append(int(discretize_income(income)))
        except ValueError as exc:
            raise DataError(f"{path}:{ln}: {exc}") from None
    return Dataset(tuple(columns), np.array(labels), INCOME_CLASS_NAMES, schema,
                   {"source": str(path), "rows_read": len(records), "rows_kept": len(kept)})


@dataclass(frozen=True)
class StandardizationParams:
    mean: Mapping[str, float]
    sd: Mapping[str, float]
    dropped: tuple[str, ...] = ()


def fit_standardization(d: Dataset, drop_constant: bool = False) -> StandardizationParams:
    mean, sd, dropped = {}, {}, []
    for c in d.columns:
        if c.kind != "numeric" or c.parent is not None:
            continue
        s = float(np.std(c.values, ddof=1)) if d.n_rows > 1 else 0.0
        if not s > 0:
            if drop_constant:
                dropped.append(c.name)
                continue
            raise DataError(f"column {c.name!r} is constant; cannot standardize")
        mean[c.name] = float(np.mean(c.values))
        sd[c.name] = s
    return StandardizationParams(mean, sd, tuple(dropped))


def apply_standardization(d: Dataset, params: StandardizationParams) -> Dataset:
    cols = []
    for c in d.columns:
        if c.name in params.dropped:
            continue
        if c.name in params.mean:
            c = replace(c, values=(c.values - params.mean[c.name]) / params.sd[c.name])
        cols.append(c)
    return replace(d, columns=tuple(cols))


def standardize(d: Dataset, drop_constant: bool = False) -> tuple[Dataset, StandardizationParams]:
    """z-score every numeric column with the sample (n-1) standard deviation."""
    params = fit_standardization(d, drop_constant)
    return apply_standardization(d, params), params


def one_hot_encode(d: Dataset) -> Dataset:
    """Replace each nominal column by 0/1 indicators named ``<col>=<category>``."""
    if not any(c.kind == "nominal" for c in d.columns):
        return d
    cols = []
    for c in d.columns:
        if c.kind != "nominal":
            cols.append(c)
            continue
        for code, cat in enumerate(c.categories):
            cols.append(Column(f"{c.name}={cat}", "numeric", (c.values == code).astype(np.float64),
                               parent=c.name, group=c.group))
    return replace(d, columns=tuple(cols))


def dataset_from_arrays(X: np.ndarray, y: Sequence[int], names: Sequence[str] | None = None,
                        class_names: Sequence[str] | None = None, **kw) -> Dataset:
    """Convenience constructor for an all-numeric dataset."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=np.int64)
    if names is None:
        names = [f"x{i}" for i in range(X.shape[1])]
    if class_names is None:
        n = int(y.max()) + 1 if y.size else 1
        class_names = INCOME_CLASS_NAMES if n == 4 else tuple(f"c{i}" for i in range(n))
    cols = tuple(Column(n, "numeric", X[:, i]) for i, n in enumerate(names))
    return Dataset(cols, y, tuple(class_names), **kw)
