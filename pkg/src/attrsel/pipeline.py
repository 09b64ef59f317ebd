"""End-to-end runs: ingest, preprocess, consensus selection, subset comparison."""
from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

from .config import PipelineConfig, config_sections
from .consensus import (FilterPanel, ForwardSelector, GaSelector, RoundResult, SelectionRun, VoteTally,
                        consensus_subset, panel_tally, per_fold_select, tally_votes)
from .data import Dataset, apply_standardization, fit_standardization, load_csv, one_hot_encode, standardize
from .evaluation import ComparisonTable, compare_subsets
from .filters import BinningSpec, FilterMethod, rank_attributes
from .folds import derive_seed, make_folds
from .report import PipelineResults, emit_report

# stream labels for seeds derived from the master seed
SELECTION_FOLDS, EVALUATION_FOLDS, SELECTOR = 0, 1, 2


def load_dataset(cfg: PipelineConfig) -> Dataset:
    """Read the configured CSV and one-hot encode nominal attributes (unstandardized)."""
    return one_hot_encode(load_csv(cfg.data_path, cfg.schema))


def preprocess(d: Dataset, cfg: PipelineConfig) -> Dataset:
    """Global standardization, or none when standardization happens inside each fold."""
    if cfg.preprocessing.fold_safe:
        return d
    return standardize(d, cfg.preprocessing.drop_constant)[0]


@dataclass(frozen=True)
class FoldStandardized:
    """Selector wrapper that z-scores each round's rows with statistics from those rows only."""

    inner: object
    drop_constant: bool = False

    @property
    def kind(self) -> str:
        return self.inner.kind

    def __call__(self, d: Dataset, round_index: int) -> RoundResult:
        return self.inner(standardize(d, self.drop_constant)[0], round_index)


def fold_standardizer(drop_constant: bool):
    def prepare(train: Dataset, test: Dataset):
        params = fit_standardization(train, drop_constant)
        return apply_standardization(train, params), apply_standardization(test, params)
    return prepare


def make_selector(cfg: PipelineConfig):
    seed = derive_seed(cfg.seed, SELECTOR)
    method = cfg.selection.method
    if method == "filters":
        sel = FilterPanel(BinningSpec(cfg.preprocessing.n_bins), cfg.consensus.filter_top_k)
    elif method == "forward":
        sel = ForwardSelector(replace(cfg.forward, seed=seed))
    else:
        sel = GaSelector(replace(cfg.ga, seed=seed))
    if cfg.preprocessing.fold_safe:
        sel = FoldStandardized(sel, cfg.preprocessing.drop_constant)
    return sel


def select(d: Dataset, cfg: PipelineConfig) -> tuple[tuple[str, ...], VoteTally, SelectionRun]:
    """Consensus selection over ``cfg.selection.folds`` rounds on 1 - 1/k of the rows each."""
    plan = make_folds(d.labels, cfg.selection.folds, derive_seed(cfg.seed, SELECTION_FOLDS))
    run = per_fold_select(d, make_selector(cfg), plan)
    if cfg.selection.method == "filters":
        tally = panel_tally(run, cfg.consensus)
        chosen = tuple(e.attribute for e in tally.entries if e.count >= cfg.consensus.method_threshold)
    else:
        tally = tally_votes(run)
        chosen = consensus_subset(tally, cfg.consensus.fold_threshold)
    return chosen, tally, run


def evaluate(d: Dataset, cfg: PipelineConfig, subsets: dict[str, tuple[str, ...]]) -> ComparisonTable:
    plan = make_folds(d.labels, cfg.evaluation.folds, derive_seed(cfg.seed, EVALUATION_FOLDS))
    prepare = fold_standardizer(cfg.preprocessing.drop_constant) if cfg.preprocessing.fold_safe else None
    subsets = {k: v for k, v in subsets.items() if v}
    return compare_subsets(d, subsets, cfg.evaluation.classifiers, plan, prepare)


def rank_all(d: Dataset, cfg: PipelineConfig):
    binning = BinningSpec(cfg.preprocessing.n_bins)
    return tuple(rank_attributes(d, m, binning) for m in FilterMethod)


def dataset_summary(d: Dataset) -> dict:
    counts = d.class_counts()
    return {"rows": d.n_rows, "attributes": list(d.attributes), "features": d.n_features,
            "class_counts": {name: int(c) for name, c in zip(d.class_names, counts)}}


def base_results(d: Dataset, cfg: PipelineConfig) -> PipelineResults:
    return PipelineResults(seed=cfg.seed, config=config_sections(cfg), dataset=dataset_summary(d))


def run_pipeline(cfg: PipelineConfig, write: bool = True) -> PipelineResults:
    """Selection followed by a comparison of the selected subset against all attributes."""
    d = preprocess(load_dataset(cfg), cfg)
    chosen, tally, run = select(d, cfg)
    res = base_results(d, cfg)
    res.method, res.run, res.tally, res.subset = cfg.selection.method, run, tally, chosen
    res.comparison = evaluate(d, cfg, {cfg.selection.method: chosen, "all": d.attributes})
    if write:
        emit_report(res, cfg.output.formats, cfg.output.directory)
    return res


def output_paths(cfg: PipelineConfig) -> list[Path]:
    return sorted(Path(cfg.output.directory).glob("*"))
