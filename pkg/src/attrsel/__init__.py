"""Consensus attribute selection for tabular classification.

Filter rankers, wrapper subset search (forward selection and a genetic
algorithm), fold-subsampled voting, and a classifier comparison harness.
"""
from .classifiers import KNN, DecisionTree, GaussianNaiveBayes, LogisticRegression, OneRule, predict, train
from .config import PipelineConfig, load_config, parse_config, serialize_config
from .consensus import (ConsensusConfig, SelectionRun, VoteTally, consensus_subset, filter_panel_table,
                        per_fold_select, tally_votes)
from .data import (AttributeSchema, Dataset, DataError, IncomeClass, discretize_income, load_csv, one_hot_encode,
                   standardize)
from .evaluation import compare_subsets, confusion_matrix, cross_validate, weighted_metrics
from .filters import BinningSpec, FilterMethod, bin_numeric, chi_square, gain_ratio, info_gain, oner_merit, rank_attributes, relief_weights
from .folds import FoldPlan, make_folds
from .logistic import lr_loss_and_gradient
from .pipeline import run_pipeline
from .report import emit_report
from .search import ForwardConfig, GaConfig, forward_select, ga_select, mutate_bits, subset_fitness, tournament_pick, two_point_crossover
from .synth import synth_generate

__version__ = "0.1.0"
