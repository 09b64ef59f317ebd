"""Wrapper subset search: logistic-regression fitness, forward selection, genetic algorithm."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .classifiers import LogisticRegression
from .data import Dataset
from .folds import derive_seed, make_folds
from .logistic import fit_softmax_batch, predict_proba_linear

# A batch fitness maps a (B, d) boolean matrix to B fitness values.
BatchFitness = Callable[[np.ndarray], np.ndarray]


# Wrapper fitness only ranks subsets, so its logistic fits run on a short
# iteration budget; standalone classifiers keep the full default.
FITNESS_MAX_ITER = 30


@dataclass(frozen=True)
class FitnessConfig:
    inner_folds: int = 5
    lr: LogisticRegression = field(default_factory=lambda: LogisticRegression(max_iter=FITNESS_MAX_ITER))

    def __post_init__(self):
        if self.inner_folds < 2:
            raise ValueError("inner_folds must be >= 2")


class SubsetFitness:
    """Mean stratified inner-CV accuracy of logistic regression on a column subset.

    The inner fold plan is fixed by ``seed``, so the value is a pure function of
    the bit pattern. Results are cached per pattern; calls evaluate all
    uncached patterns of a batch together.
    """

    def __init__(self, d: Dataset, seed: int = 0, config: FitnessConfig = FitnessConfig()):
        self.X = d.matrix()
        self.y = d.labels
        self.n_classes = d.n_classes
        self.n_features = d.n_features
        self.config = config
        self.plan = make_folds(self.y, config.inner_folds, seed, stratified=True)
        self.baseline = float(np.bincount(self.y, minlength=self.n_classes).max() / self.y.size)
        self.cache: dict[bytes, float] = {}
        self.evaluations = 0

    def __call__(self, bits) -> np.ndarray:
        bits = np.atleast_2d(np.asarray(bits, dtype=bool))
        if bits.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} bits, got {bits.shape[1]}")
        keys = [b.tobytes() for b in bits]
        todo = {}
        for k, b in zip(keys, bits):
            if k not in self.cache and k not in todo:
                todo[k] = b
        if todo:
            self._evaluate(list(todo), np.array(list(todo.values())))
        return np.array([self.cache[k] for k in keys])

    def _evaluate(self, keys, masks):
        empty = ~masks.any(axis=1)
        for k in np.array(keys, dtype=object)[empty]:
            self.cache[k] = self.baseline
        keys = [k for k, e in zip(keys, empty) if not e]
        masks = masks[~empty]
        if not keys:
            return
        lr = self.config.lr
        acc = np.zeros(len(keys))
        for train_rows, test_rows in self.plan.splits():
            fit = fit_softmax_batch(self.X[train_rows], self.y[train_rows], self.n_classes, masks,
                                    ridge=lr.ridge, max_iter=lr.max_iter, tol=lr.tol)
            pred = predict_proba_linear(fit.weights, self.X[test_rows]).argmax(axis=2)
            acc += (pred == self.y[test_rows]).mean(axis=1)
        acc /= self.plan.k
        self.evaluations += len(keys)
        for k, a in zip(keys, acc):
            self.cache[k] = float(a)


def subset_fitness(bits, d: Dataset, seed: int = 0, config: FitnessConfig = FitnessConfig()) -> float:
    """Fitness of one attribute subset; the empty subset scores the majority-class rate."""
    return float(SubsetFitness(d, seed, config)(np.asarray(bits, dtype=bool)[None])[0])


def _fitness_config(cfg) -> FitnessConfig:
    return FitnessConfig(cfg.inner_folds, LogisticRegression(max_iter=cfg.fitness_max_iter))


def as_batch(fitness: Callable[[np.ndarray], float]) -> BatchFitness:
    """Lift a single-chromosome fitness function to the batch interface."""
    def batch(bits):
        return np.array([float(fitness(b)) for b in np.atleast_2d(bits)])
    return batch


@dataclass
class Chromosome:
    bits: np.ndarray
    fitness: float | None = None

    @property
    def subset(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.bits))


@dataclass(frozen=True)
class TraceRecord:
    step: int
    best_subset: tuple[int, ...]
    best_fitness: float
    mean_fitness: float


@dataclass
class SearchTrace:
    records: list[TraceRecord] = field(default_factory=list)

    def append(self, step, best_subset, best_fitness, mean_fitness):
        self.records.append(TraceRecord(step, tuple(best_subset), float(best_fitness), float(mean_fitness)))

    def best_fitness(self) -> np.ndarray:
        return np.array([r.best_fitness for r in self.records])

    def to_csv(self, label: str = "generation") -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([label, "best_fitness", "mean_fitness"])
        for r in self.records:
            w.writerow([r.step, f"{r.best_fitness:.6g}", f"{r.mean_fitness:.6g}"])
        return buf.getvalue()


@dataclass(frozen=True)
class ForwardConfig:
    min_improvement: float = 1e-6
    max_subset_size: int | None = None
    inner_folds: int = 5
    seed: int = 0
    fitness_max_iter: int = FITNESS_MAX_ITER

    def __post_init__(self):
        if not self.min_improvement >= 0:
            raise ValueError("min_improvement must be >= 0")
        if self.max_subset_size is not None and self.max_subset_size < 0:
            raise ValueError("max_subset_size must be >= 0")


def forward_select(d: Dataset | int, cfg: ForwardConfig = ForwardConfig(),
                   fitness: BatchFitness | None = None) -> tuple[tuple[int, ...], SearchTrace]:
    """Greedy forward selection from the empty set.

    Each step adds the feature whose addition scores best (ties to the lower
    index) and stops when that gain falls below ``min_improvement`` or the size
    cap is reached. ``d`` may be a feature count when a custom ``fitness`` is given.
    """
    n_features = d if isinstance(d, int) else d.n_features
    if fitness is None:
        fitness = SubsetFitness(d, cfg.seed, _fitness_config(cfg))
    cap = n_features if cfg.max_subset_size is None else min(cfg.max_subset_size, n_features)
    current = np.zeros(n_features, dtype=bool)
    score = float(fitness(current[None])[0])
    trace = SearchTrace()
    trace.append(0, (), score, score)
    while current.sum() < cap:
        cand = np.flatnonzero(~current)
        trial = np.repeat(current[None], cand.size, axis=0)
        trial[np.arange(cand.size), cand] = True
        scores = np.asarray(fitness(trial), dtype=np.float64)
        i = int(np.argmax(scores))
        if not scores[i] - score >= cfg.min_improvement:
            break
        current = trial[i]
        score = float(scores[i])
        trace.append(len(trace.records), np.flatnonzero(current), score, float(scores.mean()))
    return tuple(int(i) for i in np.flatnonzero(current)), trace


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 500
    crossover_rate: float = 0.6
    mutation_rate: float = 0.03
    generations: int = 60
    tournament_size: int = 2
    elitism: int = 0
    seed: int = 0
    inner_folds: int = 5
    fitness_max_iter: int = FITNESS_MAX_ITER

    def __post_init__(self):
        if not (0 <= self.crossover_rate <= 1 and 0 <= self.mutation_rate <= 1):
            raise ValueError("rates must lie in [0, 1]")
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")
        if not 0 <= self.elitism <= self.population_size:
            raise ValueError("elitism must lie in [0, population_size]")


def _tournament_index(fitness: np.ndarray, size: int, rng) -> int:
    picks = rng.integers(0, fitness.shape[0], size)
    best = picks[0]
    for i in picks[1:]:
        if fitness[i] > fitness[best] or (fitness[i] == fitness[best] and i < best):
            best = i
    return int(best)


def tournament_pick(population: Sequence[Chromosome], size: int, rng) -> Chromosome:
    """Fittest of ``size`` uniform draws with replacement (ties to the earlier index)."""
    if not population:
        raise ValueError("empty population")
    fit = np.array([c.fitness for c in population], dtype=np.float64)
    return population[_tournament_index(fit, size, rng)]


def two_point_crossover(a, b, cut1: int, cut2: int) -> tuple[np.ndarray, np.ndarray]:
    """Swap the segment ``[cut1, cut2)`` between two parents."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("parents must be equal-length bit vectors")
    if not 0 <= cut1 <= cut2 <= a.shape[0]:
        raise ValueError(f"bad cut points ({cut1}, {cut2}) for length {a.shape[0]}")
    c1, c2 = a.copy(), b.copy()
    c1[cut1:cut2] = b[cut1:cut2]
    c2[cut1:cut2] = a[cut1:cut2]
    return c1, c2


def mutate_bits(bits, rate: float, rng) -> np.ndarray:
    """Flip each bit independently with probability ``rate``."""
    if not 0 <= rate <= 1:
        raise ValueError("rate must lie in [0, 1]")
    bits = np.asarray(bits, dtype=bool)
    return bits ^ (rng.random(bits.shape[0]) < rate)


def _better(f_new, n_new, f_old, n_old) -> bool:
    # equal fitness prefers the smaller subset; otherwise the incumbent stays
    return f_new > f_old or (f_new == f_old and n_new < n_old)


def ga_select(d: Dataset | int, cfg: GaConfig = GaConfig(),
              fitness: BatchFitness | None = None) -> tuple[tuple[int, ...], SearchTrace]:
    """Simple generational GA over attribute bitmasks.

    Generation 0 is a random population (each bit set with probability 0.5).
    Each of the ``cfg.generations`` breeding rounds fills a new population pair
    by pair: two tournament winners, two-point crossover with probability
    ``crossover_rate`` (otherwise copies), then per-bit mutation. Pair ``i`` of
    generation ``g`` draws from its own stream seeded by ``(seed, g, i)``.
    The best chromosome ever evaluated is returned.
    """
    n_features = d if isinstance(d, int) else d.n_features
    if n_features < 1:
        raise ValueError("need at least one attribute")
    if fitness is None:
        fitness = SubsetFitness(d, derive_seed(cfg.seed, 1), _fitness_config(cfg))
    P = cfg.population_size
    pop = np.random.default_rng([cfg.seed, 0]).random((P, n_features)) < 0.5
    fit = np.asarray(fitness(pop), dtype=np.float64)

    trace = SearchTrace()
    best_bits, best_fit = None, -np.inf

    def record(gen):
        nonlocal best_bits, best_fit
        for i in range(P):
            if best_bits is None or _better(fit[i], pop[i].sum(), best_fit, best_bits.sum()):
                best_bits, best_fit = pop[i].copy(), float(fit[i])
        trace.append(gen, np.flatnonzero(best_bits), best_fit, float(fit.mean()))

    record(0)
    for gen in range(1, cfg.generations + 1):
        children = np.empty_like(pop)
        for pair in range((P + 1) // 2):
            rng = np.random.default_rng([cfg.seed, gen, pair])
            a = pop[_tournament_index(fit, cfg.tournament_size, rng)]
            b = pop[_tournament_index(fit, cfg.tournament_size, rng)]
            if rng.random() < cfg.crossover_rate:
                cut1, cut2 = np.sort(rng.integers(0, n_features + 1, 2))
                a, b = two_point_crossover(a, b, int(cut1), int(cut2))
            children[2 * pair] = mutate_bits(a, cfg.mutation_rate, rng)
            if 2 * pair + 1 < P:
                children[2 * pair + 1] = mutate_bits(b, cfg.mutation_rate, rng)
        if cfg.elitism:
            elite = np.lexsort((pop.sum(axis=1), -fit))[:cfg.elitism]
            children[P - cfg.elitism:] = pop[elite]
        pop = children
        fit = np.asarray(fitness(pop), dtype=np.float64)
        record(gen)
    return tuple(int(i) for i in np.flatnonzero(best_bits)), trace


def exhaustive_best(n_features: int, fitness: BatchFitness, chunk: int = 4096) -> tuple[tuple[int, ...], float]:
    """Brute-force optimum over all 2^d subsets (small d only)."""
    if n_features > 20:
        raise ValueError("exhaustive search is limited to 20 attributes")
    best_bits, best_fit = None, -np.inf
    codes = np.arange(2 ** n_features)
    for start in range(0, codes.size, chunk):
        c = codes[start:start + chunk]
        bits = ((c[:, None] >> np.arange(n_features)) & 1).astype(bool)
        f = np.asarray(fitness(bits), dtype=np.float64)
        for i in range(c.size):
            if best_bits is None or _better(f[i], bits[i].sum(), best_fit, best_bits.sum()):
                best_bits, best_fit = bits[i], float(f[i])
    return tuple(int(i) for i in np.flatnonzero(best_bits)), best_fit
