"""Fold-subsampled selection rounds, vote tallies and consensus thresholds."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from .data import Dataset
from .filters import BinningSpec, FilterMethod, RankedList, rank_attributes
from .folds import FoldPlan, derive_seed
from .search import ForwardConfig, GaConfig, SearchTrace, forward_select, ga_select

# Fold-count comparisons must honour "at least 6 of 10" despite float thresholds.
_EPS = 1e-9


@dataclass(frozen=True)
class RoundResult:
    selected: frozenset[str]
    rankings: Mapping[FilterMethod, RankedList] | None = None
    trace: SearchTrace | None = None


class SelectionError(RuntimeError):
    def __init__(self, round_index: int, cause: Exception):
        super().__init__(f"selection failed in round {round_index}: {cause}")
        self.round_index = round_index


@dataclass(frozen=True)
class ConsensusConfig:
    fold_threshold: float = 0.6
    method_threshold: int = 3
    filter_top_k: int = 15

    def __post_init__(self):
        if not 0 < self.fold_threshold <= 1:
            raise ValueError("fold_threshold must lie in (0, 1]")
        if not 1 <= self.method_threshold <= len(FilterMethod):
            raise ValueError(f"method_threshold must lie in [1, {len(FilterMethod)}]")
        if self.filter_top_k < 1:
            raise ValueError("filter_top_k must be >= 1")


def _features_to_attributes(d: Dataset, features) -> frozenset[str]:
    attrs = d.feature_attributes
    return frozenset(attrs[i] for i in features)


@dataclass(frozen=True)
class FilterPanel:
    """Every filter method ranks the attributes; each selects its top ``top_k``."""

    binning: BinningSpec = field(default_factory=BinningSpec)
    top_k: int = 15
    methods: tuple[FilterMethod, ...] = tuple(FilterMethod)
    kind = "filters"

    def __call__(self, d: Dataset, round_index: int) -> RoundResult:
        rankings = {m: rank_attributes(d, m, self.binning) for m in self.methods}
        selected = frozenset().union(*(r.top(self.top_k) for r in rankings.values()))
        return RoundResult(selected, rankings)


@dataclass(frozen=True)
class ForwardSelector:
    config: ForwardConfig = field(default_factory=ForwardConfig)
    kind = "forward"

    def __call__(self, d: Dataset, round_index: int) -> RoundResult:
        cfg = replace(self.config, seed=derive_seed(self.config.seed, round_index))
        subset, trace = forward_select(d, cfg)
        return RoundResult(_features_to_attributes(d, subset), trace=trace)


@dataclass(frozen=True)
class GaSelector:
    config: GaConfig = field(default_factory=GaConfig)
    kind = "ga"

    def __call__(self, d: Dataset, round_index: int) -> RoundResult:
        cfg = replace(self.config, seed=derive_seed(self.config.seed, round_index))
        subset, trace = ga_select(d, cfg)
        return RoundResult(_features_to_attributes(d, subset), trace=trace)


@dataclass(frozen=True)
class SelectionRun:
    kind: str
    attributes: tuple[str, ...]
    rounds: tuple[RoundResult, ...]
    seed: int

    @property
    def k(self) -> int:
        return len(self.rounds)

    @property
    def selected(self) -> tuple[frozenset[str], ...]:
        return tuple(r.selected for r in self.rounds)


def per_fold_select(d: Dataset, selector: Callable[[Dataset, int], RoundResult | set],
                    plan: FoldPlan) -> SelectionRun:
    """Run ``selector`` once per fold on all rows outside that fold.

    ``selector(data, round_index)`` may return a :class:`RoundResult` or a
    plain collection of attribute names.
    """
    if plan.n_rows != d.n_rows:
        raise ValueError("fold plan does not match the dataset")
    rounds = []
    for r in range(plan.k):
        try:
            out = selector(d.take(plan.train_rows(r)), r)
        except Exception as exc:
            raise SelectionError(r, exc) from exc
        if not isinstance(out, RoundResult):
            out = RoundResult(frozenset(out))
        unknown = out.selected - set(d.attributes)
        if unknown:
            raise SelectionError(r, KeyError(f"unknown attributes {sorted(unknown)}"))
        rounds.append(out)
    return SelectionRun(getattr(selector, "kind", "custom"), d.attributes, tuple(rounds), plan.seed)


@dataclass(frozen=True)
class TallyEntry:
    attribute: str
    count: int
    voters: int
    average_rank: float | None = None

    @property
    def votes(self) -> float:
        return self.count / self.voters


@dataclass(frozen=True)
class VoteTally:
    kind: str
    entries: tuple[TallyEntry, ...]
    method_ranks: Mapping[FilterMethod, Mapping[str, float]] | None = None

    def __getitem__(self, attribute: str) -> TallyEntry:
        for e in self.entries:
            if e.attribute == attribute:
                return e
        raise KeyError(attribute)

    def votes(self) -> dict[str, float]:
        return {e.attribute: e.votes for e in self.entries}


def fold_averaged_ranks(run: SelectionRun) -> dict[FilterMethod, dict[str, float]]:
    """Per method, the mean rank of each attribute over the rounds."""
    if not run.rounds or run.rounds[0].rankings is None:
        return {}
    out = {}
    for m in run.rounds[0].rankings:
        out[m] = {a: float(np.mean([r.rankings[m].rank_of(a) for r in run.rounds])) for a in run.attributes}
    return out


def tally_votes(run: SelectionRun) -> VoteTally:
    """Fraction of rounds whose selection contains each attribute."""
    counts = {a: 0 for a in run.attributes}
    for sel in run.selected:
        for a in sel:
            counts[a] += 1
    entries = tuple(TallyEntry(a, counts[a], run.k) for a in run.attributes)
    ranks = fold_averaged_ranks(run)
    return VoteTally(run.kind, entries, ranks or None)


def _meets(count: int, voters: int, threshold: float) -> bool:
    return count >= threshold * voters - _EPS


def consensus_subset(tally: VoteTally, threshold: float = 0.6) -> tuple[str, ...]:
    """Attributes whose vote fraction is at least ``threshold``."""
    if not 0 < threshold <= 1:
        raise ValueError("threshold must lie in (0, 1]")
    return tuple(e.attribute for e in tally.entries if _meets(e.count, e.voters, threshold))


def panel_tally(run: SelectionRun, cfg: ConsensusConfig) -> VoteTally:
    """Method-level votes for a filter-panel run.

    A method votes for an attribute it placed in its top ``filter_top_k`` in at
    least ``fold_threshold`` of the rounds. The average rank is taken over the
    voting methods' fold-averaged ranks only.
    """
    ranks = fold_averaged_ranks(run)
    if not ranks:
        raise ValueError("run carries no rankings")
    entries = []
    for a in run.attributes:
        voting = []
        for m, mr in ranks.items():
            hits = sum(r.rankings[m].rank_of(a) <= cfg.filter_top_k for r in run.rounds)
            if _meets(hits, run.k, cfg.fold_threshold):
                voting.append(mr[a])
        avg = float(np.mean(voting)) if voting else None
        entries.append(TallyEntry(a, len(voting), len(ranks), avg))
    return VoteTally("filters", tuple(entries), ranks)


def filter_panel_table(d: Dataset, plan: FoldPlan, cfg: ConsensusConfig = ConsensusConfig(),
                       binning: BinningSpec = BinningSpec(),
                       methods: Sequence[FilterMethod] = tuple(FilterMethod)) -> tuple[tuple[str, ...], VoteTally, SelectionRun]:
    run = per_fold_select(d, FilterPanel(binning, cfg.filter_top_k, tuple(methods)), plan)
    tally = panel_tally(run, cfg)
    chosen = tuple(e.attribute for e in tally.entries if e.count >= cfg.method_threshold)
    return chosen, tally, run


def sorted_entries(tally: VoteTally) -> list[TallyEntry]:
    """Table order: most votes first, then best average rank, then column order."""
    def key(e):
        return (-e.votes, e.average_rank if e.average_rank is not None else math.inf)
    return sorted(tally.entries, key=key)
