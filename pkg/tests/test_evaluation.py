import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from attrsel.classifiers import KNN, GaussianNaiveBayes, LogisticRegression
from attrsel.data import dataset_from_arrays
from attrsel.evaluation import (ConfusionMatrix, compare_subsets, confusion_matrix, cross_validate, weighted_metrics,
                                weighted_recall_direct)
from attrsel.folds import FoldPlan, make_folds
from attrsel.synth import synth_generate

matrices = st.integers(2, 5).flatmap(
    lambda k: st.lists(st.lists(st.integers(0, 30), min_size=k, max_size=k), min_size=k, max_size=k)
).filter(lambda m: sum(map(sum, m)) > 0)


class TestConfusion:
    def test_small(self):
        cm = confusion_matrix([0, 1, 1], [0, 0, 1])
        assert cm.counts.tolist() == [[1, 1], [0, 1]]
        assert cm.total == 3

    def test_perfect_diagonal(self):
        cm = confusion_matrix([0, 1, 2, 2], [0, 1, 2, 2], 4)
        assert np.array_equal(cm.counts, np.diag([1, 1, 2, 0]))

    def test_errors(self):
        with pytest.raises(ValueError):
            confusion_matrix([0, 1], [0])
        with pytest.raises(ValueError):
            ConfusionMatrix(np.array([[1, -1], [0, 0]]))


class TestMetrics:
    def test_worked_example(self):
        r = weighted_metrics(ConfusionMatrix(np.array([[3, 0], [1, 0]])))
        assert r.precision == (0.75, 0.0) and r.recall == (1.0, 0.0)
        assert abs(r.f1[0] - 6 / 7) <= 1e-12
        assert abs(r.weighted_f1 - 0.642857142857143) <= 1e-12
        assert r.accuracy == 0.75

    def test_diagonal(self):
        r = weighted_metrics(ConfusionMatrix(np.diag([3, 4, 5])))
        assert r.accuracy == r.weighted_precision == r.weighted_recall == r.weighted_f1 == 1.0

    def test_empty(self):
        with pytest.raises(ValueError):
            weighted_metrics(ConfusionMatrix(np.zeros((2, 2))))

    @settings(max_examples=100, deadline=None)
    @given(matrices)
    def test_recall_identity_and_oracle(self, m):
        cm = ConfusionMatrix(np.array(m))
        r = weighted_metrics(cm)
        assert r.weighted_recall == r.accuracy
        assert math.isclose(weighted_recall_direct(cm), r.accuracy, rel_tol=1e-12)
        acc, wp, wr, wf = oracles.weighted_scores(m)
        assert acc == r.accuracy
        assert abs(wp - r.weighted_precision) <= 1e-12 and abs(wf - r.weighted_f1) <= 1e-12
        for v in (r.accuracy, r.weighted_precision, r.weighted_f1, *r.precision, *r.recall, *r.f1):
            assert 0 <= v <= 1

    @settings(max_examples=50, deadline=None)
    @given(matrices, st.randoms())
    def test_class_permutation(self, m, rnd):
        c = np.array(m)
        perm = list(range(len(m)))
        rnd.shuffle(perm)
        p = np.array(perm)
        a, b = weighted_metrics(ConfusionMatrix(c)), weighted_metrics(ConfusionMatrix(c[np.ix_(p, p)]))
        assert a.accuracy == b.accuracy
        assert math.isclose(a.weighted_f1, b.weighted_f1, abs_tol=1e-12)
        assert np.allclose(np.array(a.f1)[p], b.f1)


class TestCrossValidate:
    def test_separable(self):
        rng = np.random.default_rng(0)
        y = rng.integers(0, 3, 90)
        d = dataset_from_arrays(rng.normal(size=(90, 2)) * 0.1 + y[:, None] * 5, y)
        for spec in (LogisticRegression(), GaussianNaiveBayes(), KNN(k=3)):
            r, cm = cross_validate(spec, d, make_folds(y, 10, 0))
            assert r.accuracy == 1.0 and cm.total == 90

    def test_knn_duplicates(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(20, 2))
        y = rng.integers(0, 3, 20)
        d = dataset_from_arrays(np.vstack([X, X]), np.r_[y, y])
        plan = FoldPlan(2, np.r_[np.zeros(20, int), np.ones(20, int)], 0, False)
        assert cross_validate(KNN(k=1), d, plan)[0].accuracy == 1.0

    def test_deterministic(self):
        d = synth_generate(120, 2, 2, seed=0)
        plan = make_folds(d.labels, 5, 0)
        a = cross_validate(LogisticRegression(), d, plan)
        b = cross_validate(LogisticRegression(), d, plan)
        assert a == b

    def test_plan_mismatch(self):
        d = synth_generate(60, 1, 1, seed=0)
        with pytest.raises(ValueError):
            cross_validate(KNN(), d, make_folds(np.zeros(10, int), 2, 0))


class TestCompare:
    def test_planted_beats_noise(self):
        d = synth_generate(400, 3, 3, seed=6)
        inf, noise = d.provenance["informative"], d.provenance["noise"]
        t = compare_subsets(d, {"planted": inf, "noise": noise}, [LogisticRegression()], make_folds(d.labels, 10, 0))
        by = {r.subset: r for r in t.rows}
        assert by["planted"].metrics.weighted_f1 > by["noise"].metrics.weighted_f1
        assert t.ranking()[0].subset == "planted"

    def test_single_row_matches_cross_validate(self):
        d = synth_generate(100, 2, 1, seed=1)
        plan = make_folds(d.labels, 5, 0)
        t = compare_subsets(d, {"all": d.attributes}, [KNN(k=10)], plan)
        assert len(t.rows) == 1
        assert t.rows[0].metrics == cross_validate(KNN(k=10), d, plan)[0]
        assert t.rows[0].algorithm == "knn(k=10)"

    def test_duplicate_subsets_identical(self):
        d = synth_generate(100, 2, 1, seed=1)
        t = compare_subsets(d, {"a": d.attributes[:2], "b": d.attributes[:2]}, [GaussianNaiveBayes()],
                            make_folds(d.labels, 5, 0))
        assert t.rows[0].metrics == t.rows[1].metrics

    def test_empty_subset(self):
        d = synth_generate(60, 1, 1, seed=0)
        with pytest.raises(ValueError):
            compare_subsets(d, {"none": ()}, [KNN()], make_folds(d.labels, 5, 0))

    def test_ranking_tie_break(self):
        from attrsel.evaluation import ComparisonRow, ComparisonTable, MetricsReport
        m1 = MetricsReport(0.7, (), (), (), (), 0.5, 0.7, 0.6)
        m2 = MetricsReport(0.8, (), (), (), (), 0.5, 0.8, 0.6)
        t = ComparisonTable((ComparisonRow("s", 1, "a", m1), ComparisonRow("s", 1, "b", m2)))
        assert [r.algorithm for r in t.ranking()] == ["b", "a"]
        assert t.chart_data()[0] == ("a [s]", 0.7, 0.6)
