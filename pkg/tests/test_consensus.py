import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from attrsel.consensus import (ConsensusConfig, FilterPanel, RoundResult, SelectionError, VoteTally, TallyEntry,
                               consensus_subset, filter_panel_table, panel_tally, per_fold_select, sorted_entries,
                               tally_votes)
from attrsel.data import dataset_from_arrays
from attrsel.filters import FilterMethod, RankEntry, RankedList, rank_attributes
from attrsel.folds import make_folds
from attrsel.synth import synth_generate

METHODS = list(FilterMethod)


def toy(n=30, p=4):
    rng = np.random.default_rng(0)
    return dataset_from_arrays(rng.normal(size=(n, p)), np.arange(n) % 3, names=list("abcd")[:p])


def tally_of(counts, voters=10):
    return VoteTally("ga", tuple(TallyEntry(a, c, voters) for a, c in counts.items()))


class TestPerFold:
    def test_stub_constant(self):
        d = toy()
        run = per_fold_select(d, lambda sub, r: {"a", "c"}, make_folds(d.labels, 10, 0))
        assert run.k == 10 and all(s == {"a", "c"} for s in run.selected)

    def test_rounds_exclude_their_fold(self):
        d = toy()
        plan = make_folds(d.labels, 10, 3)
        seen = []

        def sel(sub, r):
            seen.append(sub.n_rows)
            return set()
        per_fold_select(d, sel, plan)
        assert seen == [d.n_rows - len(plan.test_rows(r)) for r in range(10)]

    def test_error_carries_round(self):
        d = toy()

        def sel(sub, r):
            if r == 4:
                raise RuntimeError("boom")
            return set()
        with pytest.raises(SelectionError) as err:
            per_fold_select(d, sel, make_folds(d.labels, 10, 0))
        assert err.value.round_index == 4

    def test_unknown_attribute(self):
        d = toy()
        with pytest.raises(SelectionError):
            per_fold_select(d, lambda sub, r: {"zzz"}, make_folds(d.labels, 5, 0))

    def test_planted_info_gain_top5_within_planted(self):
        d = synth_generate(1500, 5, 25, 4, seed=11)

        def top5(sub, r):
            return set(rank_attributes(sub, FilterMethod.InfoGain).top(5))
        run = per_fold_select(d, top5, make_folds(d.labels, 10, 1))
        assert all(s <= set(d.provenance["informative"]) for s in run.selected)

    def test_deterministic(self):
        d = synth_generate(200, 2, 3, seed=1)
        plan = make_folds(d.labels, 5, 2)
        a = per_fold_select(d, FilterPanel(top_k=2), plan)
        b = per_fold_select(d, FilterPanel(top_k=2), plan)
        assert a.selected == b.selected


class TestTally:
    def stub_run(self):
        d = toy()

        def sel(sub, r):
            out = {"a"}
            if r < 6:
                out.add("b")
            if r < 5:
                out.add("c")
            return out
        return per_fold_select(d, sel, make_folds(d.labels, 10, 0))

    def test_exact_votes(self):
        t = tally_votes(self.stub_run())
        assert t.votes() == {"a": 1.0, "b": 0.6, "c": 0.5, "d": 0.0}
        assert t.method_ranks is None

    def test_inclusive_boundary(self):
        t = tally_votes(self.stub_run())
        assert consensus_subset(t, 0.6) == ("a", "b")
        assert consensus_subset(t, 0.9) == ("a",)
        assert consensus_subset(t, 0.5) == ("a", "b", "c")

    def test_six_of_ten_example(self):
        t = tally_of({"a": 10, "b": 6, "c": 5})
        assert consensus_subset(t, 0.6) == ("a", "b")
        assert consensus_subset(tally_of({"a": 10, "b": 10}), 0.6) == ("a", "b")

    def test_ninety_percent(self):
        assert tally_of({"a": 9}).votes()["a"] == 0.9

    def test_threshold_range(self):
        with pytest.raises(ValueError):
            consensus_subset(tally_of({"a": 1}), 0.0)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.integers(0, 10), min_size=1, max_size=8), st.floats(0.01, 1), st.floats(0.01, 1))
    def test_monotone_threshold(self, counts, t1, t2):
        lo, hi = sorted((t1, t2))
        t = tally_of({f"a{i}": c for i, c in enumerate(counts)})
        assert set(consensus_subset(t, hi)) <= set(consensus_subset(t, lo))

    @settings(max_examples=30, deadline=None)
    @given(st.permutations(range(10)))
    def test_round_order_invariant(self, perm):
        run = self.stub_run()
        shuffled = type(run)(run.kind, run.attributes, tuple(run.rounds[i] for i in perm), run.seed)
        assert tally_votes(shuffled).votes() == tally_votes(run).votes()


def ranked(method, order):
    return RankedList(method, tuple(RankEntry(a, float(len(order) - i), i + 1) for i, a in enumerate(order)))


class PanelStub:
    """Five methods with scripted orderings over attributes x, y, z."""

    kind = "filters"

    def __call__(self, d, r):
        orders = [
            "xyz",
            "xyz" if r < 6 else "yxz",
            "yxz" if r < 5 else "xyz",
            "zxy",
            "xzy",
        ]
        rankings = {m: ranked(m, o) for m, o in zip(METHODS, orders)}
        return RoundResult(frozenset(o[0] for o in orders), rankings)


class TestPanel:
    def test_hand_computed(self):
        d = dataset_from_arrays(np.zeros((20, 3)), np.arange(20) % 2, names=list("xyz"))
        run = per_fold_select(d, PanelStub(), make_folds(d.labels, 10, 0))
        cfg = ConsensusConfig(filter_top_k=1)
        t = panel_tally(run, cfg)
        assert t["x"].count == 3 and t["y"].count == 0 and t["z"].count == 1
        assert t["x"].average_rank == (1 + 1.4 + 1) / 3
        assert t["y"].average_rank is None
        assert t["z"].average_rank == 1.0
        assert t.method_ranks[METHODS[1]]["x"] == 1.4
        assert [e.attribute for e in sorted_entries(t)] == ["x", "z", "y"]

    def test_unanimous_top(self):
        d = dataset_from_arrays(np.zeros((20, 3)), np.arange(20) % 2, names=list("xyz"))

        class Unanimous:
            kind = "filters"

            def __call__(self, d, r):
                return RoundResult(frozenset("x"), {m: ranked(m, "xyz") for m in METHODS})
        t = panel_tally(per_fold_select(d, Unanimous(), make_folds(d.labels, 10, 0)), ConsensusConfig(filter_top_k=1))
        assert t["x"].count == 5 and t["x"].average_rank == 1.0

    def test_mean_of_voting_methods(self):
        d = dataset_from_arrays(np.zeros((20, 5)), np.arange(20) % 2, names=list("abcde"))

        class Scripted:
            kind = "filters"

            def __call__(self, d, r):
                orders = ["eabcd", "deabc", "cdeab", "bcdea", "abcde"]
                return RoundResult(frozenset(), {m: ranked(m, o) for m, o in zip(METHODS, orders)})
        t = panel_tally(per_fold_select(d, Scripted(), make_folds(d.labels, 10, 0)), ConsensusConfig(filter_top_k=3))
        # e sits at ranks 1, 2, 3 for the first three methods and 4, 5 for the rest
        assert t["e"].count == 3 and t["e"].average_rank == 2.0

    def test_real_panel_invariants(self):
        d = synth_generate(300, 3, 6, seed=2)
        cfg = ConsensusConfig(filter_top_k=4)
        chosen, tally, run = filter_panel_table(d, make_folds(d.labels, 10, 0), cfg)
        assert len(chosen) <= d.n_features
        assert all(tally[a].count >= cfg.method_threshold for a in chosen)
        assert set(d.provenance["informative"]) <= set(chosen)
        for e in tally.entries:
            assert e.count <= 5 and (e.average_rank is None) == (e.count == 0)

    def test_config_validation(self):
        for kw in ({"fold_threshold": 0}, {"method_threshold": 6}, {"filter_top_k": 0}):
            with pytest.raises(ValueError):
                ConsensusConfig(**kw)
