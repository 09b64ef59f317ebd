import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from attrsel.data import dataset_from_arrays
from attrsel.search import (Chromosome, ForwardConfig, GaConfig, SubsetFitness, exhaustive_best, forward_select,
                            ga_select, mutate_bits, subset_fitness, tournament_pick, two_point_crossover)
from attrsel.synth import synth_generate


def planted_fitness(planted, penalty=0.01):
    planted = np.asarray(planted, dtype=bool)

    def f(bits):
        bits = np.atleast_2d(bits)
        return (bits & planted).sum(axis=1) / planted.sum() - penalty * (bits & ~planted).sum(axis=1)
    return f


class TestFitness:
    def test_empty_is_majority_prior(self):
        y = np.array([0] * 40 + [1] * 30 + [2] * 20 + [3] * 10)
        d = dataset_from_arrays(np.random.default_rng(0).normal(size=(100, 3)), y)
        assert subset_fitness(np.zeros(3, bool), d) == 0.40

    def test_separating_attribute(self):
        rng = np.random.default_rng(1)
        y = rng.integers(0, 2, 100)
        X = np.column_stack([y * 4.0 - 2 + rng.uniform(-0.5, 0.5, 100), rng.normal(size=100)])
        assert subset_fitness([True, False], dataset_from_arrays(X, y)) == 1.0

    def test_deterministic_and_bounded(self):
        d = synth_generate(150, 2, 3, seed=4)
        bits = np.array([1, 0, 1, 1, 0], bool)
        a, b = subset_fitness(bits, d, seed=3), subset_fitness(bits, d, seed=3)
        assert a == b and 0 <= a <= 1

    def test_cache_is_invisible(self):
        d = synth_generate(120, 2, 3, seed=4)
        bits = np.random.default_rng(0).random((12, 5)) < 0.5
        f = SubsetFitness(d, 7)
        batch = f(bits)
        again = f(bits[::-1])[::-1]
        fresh = np.array([SubsetFitness(d, 7)(b[None])[0] for b in bits])
        assert np.array_equal(batch, again) and np.array_equal(batch, fresh)
        # the empty pattern is answered by the baseline rule without training
        assert f.evaluations == len({b.tobytes() for b in bits if b.any()})

    def test_wrong_width(self):
        with pytest.raises(ValueError):
            SubsetFitness(synth_generate(60, 1, 1, seed=0))(np.ones((1, 3), bool))


class TestOperators:
    def test_crossover_example(self):
        a, b = np.ones(6, bool), np.zeros(6, bool)
        c1, c2 = two_point_crossover(a, b, 2, 4)
        assert "".join(map(str, c1.astype(int))) == "110011"
        assert "".join(map(str, c2.astype(int))) == "001100"

    def test_crossover_identity(self):
        a, b = np.array([1, 0, 1], bool), np.array([0, 0, 1], bool)
        c1, c2 = two_point_crossover(a, b, 0, 0)
        assert np.array_equal(c1, a) and np.array_equal(c2, b)

    @pytest.mark.parametrize("cuts", [(3, 2), (-1, 2), (0, 7)])
    def test_crossover_bad_cuts(self, cuts):
        with pytest.raises(ValueError):
            two_point_crossover(np.zeros(6, bool), np.ones(6, bool), *cuts)

    @given(st.lists(st.booleans(), min_size=1, max_size=30), st.data())
    def test_crossover_preserves_columns(self, bits, data):
        a = np.array(bits)
        b = np.array(data.draw(st.lists(st.booleans(), min_size=len(bits), max_size=len(bits))))
        c1 = data.draw(st.integers(0, len(bits)))
        c2 = data.draw(st.integers(c1, len(bits)))
        x, y = two_point_crossover(a, b, c1, c2)
        assert np.array_equal(x.astype(int) + y, a.astype(int) + b)

    def test_mutation_extremes(self):
        rng = np.random.default_rng(0)
        bits = rng.random(50) < 0.5
        assert np.array_equal(mutate_bits(bits, 0.0, rng), bits)
        assert np.array_equal(mutate_bits(bits, 1.0, rng), ~bits)
        with pytest.raises(ValueError):
            mutate_bits(bits, 1.5, rng)

    def test_mutation_rate(self):
        flipped = mutate_bits(np.zeros(10_000, bool), 0.03, np.random.default_rng(12)).sum()
        assert 240 <= flipped <= 360

    def test_tournament(self):
        pop = [Chromosome(np.array([1, 0], bool), 0.9), Chromosome(np.array([0, 1], bool), 0.1)]

        class Both:
            def integers(self, lo, hi, size):
                return np.array([1, 0])
        assert tournament_pick(pop, 2, Both()) is pop[0]
        with pytest.raises(ValueError):
            tournament_pick([], 2, np.random.default_rng(0))

    def test_tournament_ties_to_earlier(self):
        pop = [Chromosome(np.zeros(1, bool), 0.5) for _ in range(3)]

        class Draw:
            def integers(self, lo, hi, size):
                return np.array([2, 1])
        assert tournament_pick(pop, 2, Draw()) is pop[1]

    def test_tournament_size_one_uniform(self):
        pop = [Chromosome(np.zeros(1, bool), float(i)) for i in range(4)]
        rng = np.random.default_rng(0)
        counts = np.bincount([pop.index(tournament_pick(pop, 1, rng)) for _ in range(4000)], minlength=4)
        assert counts.min() > 850

    def test_config_validation(self):
        for kw in ({"crossover_rate": 1.2}, {"population_size": 1}, {"generations": 0}, {"elitism": 600}):
            with pytest.raises(ValueError):
                GaConfig(**kw)
        with pytest.raises(ValueError):
            ForwardConfig(min_improvement=-1)


class TestForward:
    def test_planted_oracle(self):
        planted = np.zeros(12, bool)
        planted[[1, 4, 9]] = True
        subset, trace = forward_select(12, ForwardConfig(), planted_fitness(planted))
        assert subset == (1, 4, 9)
        fits = trace.best_fitness()
        assert np.all(np.diff(fits) > 0)

    def test_infinite_threshold(self):
        subset, _ = forward_select(5, ForwardConfig(min_improvement=float("inf")), planted_fitness([1, 0, 0, 0, 0]))
        assert subset == ()

    def test_size_cap(self):
        subset, _ = forward_select(6, ForwardConfig(max_subset_size=2), planted_fitness([1, 1, 1, 1, 0, 0]))
        assert subset == (0, 1)

    def test_on_data(self):
        d = synth_generate(300, 2, 4, seed=2)
        subset, _ = forward_select(d, ForwardConfig(seed=1))
        assert {d.names[i] for i in subset} >= set(d.provenance["informative"])


class TestGa:
    def test_planted_oracle(self):
        hits = 0
        for seed in range(10):
            planted = np.zeros(30, bool)
            planted[np.random.default_rng(100 + seed).choice(30, 5, replace=False)] = True
            subset, _ = ga_select(30, GaConfig(population_size=100, generations=40, seed=seed),
                                  planted_fitness(planted))
            hits += len(set(subset) & set(np.flatnonzero(planted))) >= 4
        assert hits >= 8

    def test_one_generation_no_variation_returns_initial_best(self):
        f = planted_fitness(np.array([1, 1, 0, 0, 0, 0, 0, 0], bool))
        cfg = GaConfig(population_size=20, generations=1, crossover_rate=0, mutation_rate=0, seed=5)
        subset, trace = ga_select(8, cfg, f)
        init = np.random.default_rng([5, 0]).random((20, 8)) < 0.5
        fit = f(init)
        best = max(range(20), key=lambda i: (fit[i], -init[i].sum(), -i))
        assert subset == tuple(np.flatnonzero(init[best]))
        assert trace.records[0].best_fitness == trace.records[1].best_fitness

    @pytest.mark.parametrize("elitism", [0, 2])
    def test_trace_monotone_and_deterministic(self, elitism):
        f = planted_fitness(np.arange(10) % 3 == 0)
        cfg = GaConfig(population_size=16, generations=12, elitism=elitism, seed=3)
        a = ga_select(10, cfg, f)
        b = ga_select(10, cfg, f)
        assert a[0] == b[0] and a[1].records == b[1].records
        assert np.all(np.diff(a[1].best_fitness()) >= 0)
        assert len(a[1].records) == 13

    def test_constant_population_size(self):
        sizes = []

        def f(bits):
            sizes.append(len(bits))
            return np.atleast_2d(bits).sum(axis=1) / 10.0
        ga_select(10, GaConfig(population_size=15, generations=4, seed=0), f)
        assert sizes == [15] * 5

    def test_exhaustive(self):
        f = planted_fitness(np.array([0, 1, 1, 0], bool))
        subset, best = exhaustive_best(4, f)
        assert subset == (1, 2) and best == 1.0

    def test_trace_csv(self):
        _, t = ga_select(4, GaConfig(population_size=4, generations=2), planted_fitness([1, 0, 0, 1]))
        assert t.to_csv().splitlines()[0] == "generation,best_fitness,mean_fitness"
