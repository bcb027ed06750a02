import math

import pytest
from hypothesis import given, strategies as st

from polykg import (
    RankOutcome,
    corpus_bleu,
    coverage_score,
    hits_at_k,
    mrr,
    precision_task_score,
    rank_of_gold,
)


class TestRankOfGold:
    def test_filtering_shifts_rank_up(self):
        assert rank_of_gold(["A", "gold", "B"], "gold", {"A"}) == RankOutcome(1)

    def test_gold_absent(self):
        assert rank_of_gold(["A", "B"], "gold") == RankOutcome(None)

    def test_singleton(self):
        assert rank_of_gold(["gold"], "gold") == RankOutcome(1)

    def test_gold_in_filter_set_rejected(self):
        with pytest.raises(ValueError):
            rank_of_gold(["gold"], "gold", {"gold"})


class TestHitsAndMrr:
    OUTCOMES = [RankOutcome(1), RankOutcome(2), RankOutcome(None)]

    def test_hits_at_1(self):
        assert hits_at_k(self.OUTCOMES, 1) == pytest.approx(1 / 3)

    def test_hits_at_3(self):
        assert hits_at_k(self.OUTCOMES, 3) == pytest.approx(2 / 3)

    def test_all_absent(self):
        assert hits_at_k([RankOutcome(None)] * 4, 5) == 0.0

    def test_mrr_example(self):
        assert mrr(self.OUTCOMES) == pytest.approx(0.5)

    def test_mrr_all_first(self):
        assert mrr([RankOutcome(1)] * 3) == 1.0

    def test_mrr_single(self):
        assert mrr([RankOutcome(3)]) == pytest.approx(1 / 3)

    def test_empty_outcomes_rejected(self):
        with pytest.raises(ValueError):
            hits_at_k([], 1)
        with pytest.raises(ValueError):
            mrr([])

    @given(
        st.lists(
            st.one_of(st.none(), st.integers(1, 30)).map(RankOutcome), min_size=1, max_size=30
        )
    )
    def test_bounds_and_monotonicity(self, outcomes):
        values = [hits_at_k(outcomes, k) for k in range(1, 12)]
        assert all(0.0 <= v <= 1.0 for v in values)
        assert all(a <= b for a, b in zip(values, values[1:]))
        m = mrr(outcomes)
        assert values[0] <= m <= 1.0


class TestCoverage:
    def test_partial_name_inventory(self):
        score = coverage_score(["乔·拜登"], ["乔·拜登", "乔·罗宾内特·拜登"], "zh")
        assert score.precision == 1.0
        assert score.recall == 0.5
        assert score.f1 == pytest.approx(2 / 3)

    def test_perfect(self):
        score = coverage_score(["A", "b"], ["a", "B"], "en")
        assert score.f1 == 1.0

    def test_disjoint(self):
        assert coverage_score(["x"], ["y"], "en").f1 == 0.0

    def test_empty_gold_rejected(self):
        with pytest.raises(ValueError):
            coverage_score(["x"], [], "en")

    def test_swap_exchanges_precision_and_recall(self):
        a = coverage_score(["x", "y"], ["x", "z", "w"], "en")
        b = coverage_score(["x", "z", "w"], ["x", "y"], "en")
        assert a.precision == b.recall
        assert a.recall == b.precision


class TestPrecisionTask:
    def test_perfect_classifier(self):
        score = precision_task_score([("a", True), ("b", False)], ["a"], "en")
        assert score.f1 == 1.0

    def test_overgenerating_system(self):
        # tp=1 (a), fp=1 (b) -> p=0.5, r=1, f1=2/3
        score = precision_task_score([("a", True), ("b", False)], ["a", "b"], "en")
        assert score.precision == 0.5
        assert score.recall == 1.0
        assert score.f1 == pytest.approx(2 / 3)

    def test_empty_system(self):
        score = precision_task_score([("a", True), ("b", False)], [], "en")
        assert score.recall == 0.0
        assert score.f1 == 0.0

    def test_empty_labels_rejected(self):
        with pytest.raises(ValueError):
            precision_task_score([], ["a"], "en")


class TestBleu:
    def test_identity(self):
        pairs = [("the cat sat", ["the cat sat"]), ("politician", ["politician"])]
        assert corpus_bleu(pairs, lang="en") == 1.0

    def test_disjoint(self):
        assert corpus_bleu([("aa bb", ["cc dd"])], lang="en") == 0.0

    def test_hand_computed_three_gram_example(self):
        # candidate "the cat sat" vs reference "the cat sat down":
        # p1 = p2 = p3 = 1 (no 4-grams possible), BP = exp(1 - 4/3)
        score = corpus_bleu([("the cat sat", ["the cat sat down"])], lang="en")
        assert score == pytest.approx(math.exp(-1 / 3), abs=1e-9)

    def test_empty_candidate_counts(self):
        pairs = [("", ["reference text"]), ("reference text", ["reference text"])]
        score = corpus_bleu(pairs, lang="en")
        assert 0.0 <= score < 1.0

    def test_zero_precision_at_some_order_zeroes_the_score(self):
        # shared unigrams but no shared bigrams
        assert corpus_bleu([("cat the", ["the cat"])], lang="en") == 0.0

    def test_multiset_clipping(self):
        # "the the the" vs "the cat": clipped unigram matches = 1 of 3
        score = corpus_bleu([("the the the", ["the cat"])], max_n=1, lang="en")
        assert score == pytest.approx((1 / 3) * 1.0)

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            corpus_bleu([])

    def test_unsegmented_language_tokenization(self):
        assert corpus_bleu([("政治家", ["政治家"])], lang="zh") == 1.0

    @given(
        st.lists(
            st.tuples(
                st.text("abcde ", min_size=1, max_size=12),
                st.lists(st.text("abcde ", min_size=1, max_size=12), min_size=1, max_size=3),
            ),
            min_size=1,
            max_size=6,
        )
    )
    def test_bounded(self, pairs):
        assert 0.0 <= corpus_bleu(pairs, lang="en") <= 1.0

    @given(st.lists(st.text("abcdef ", min_size=1, max_size=20), min_size=1, max_size=8))
    def test_identity_is_one_for_any_corpus(self, texts):
        pairs = [(t, [t]) for t in texts if t.strip()]
        if not pairs:
            return
        assert corpus_bleu(pairs, lang="en") == pytest.approx(1.0)
