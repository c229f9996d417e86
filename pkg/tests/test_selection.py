import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from reviewselect.config import SelectionConfig
from reviewselect.corpus import UserPreferences, build_corpus, generate_fixture
from reviewselect.coverage import CoverageMatrix, build_pair_table
from reviewselect.indexing import build_index
from reviewselect.selection import SelectionError, prsa, review_coverage, review_efficiency

SYN_ONLY = SelectionConfig(w_sem=0.0, w_sent=0.0)


def small_corpus(pipeline, reviews, tips):
    return build_corpus(
        [{"id": f"r{i + 1}", "venue_id": "v", "text": t} for i, t in enumerate(reviews)],
        [{"id": f"t{i + 1}", "venue_id": "v", "text": t} for i, t in enumerate(tips)],
        pipeline,
    )


def test_shared_sentence_selects_review(pipeline, lexicon):
    c = small_corpus(pipeline, ["Pizza crust crispy. Parking awful.", "Quiet patio."], ["Pizza crust crispy."])
    idx = build_index(c, lexicon)
    sel = prsa(c, ["t1"], None, idx, SelectionConfig(match_count_threshold=1, match_threshold=0.5))
    assert "r1" in sel.ids


def test_t_above_tip_count_is_empty(fixture_corpus, fixture_index, fixture_table, fixture_tips):
    cfg = SelectionConfig(match_count_threshold=len(fixture_tips) + 1)
    sel = prsa(fixture_corpus, fixture_tips, None, fixture_index, cfg, table=fixture_table)
    assert sel.selected == () and sel.rejected_count == fixture_corpus.n_reviews


def test_empty_tip_selection_rejected(fixture_corpus, fixture_index):
    with pytest.raises(SelectionError, match="tip subset required"):
        prsa(fixture_corpus, [], None, fixture_index, SelectionConfig())
    with pytest.raises(SelectionError):
        prsa(fixture_corpus, ["nope"], None, fixture_index, SelectionConfig())


@pytest.mark.parametrize("t", [1, 2])
def test_fixture_prsa_equals_recount(fixture_corpus, fixture_index, fixture_table, fixture_tips, lexicon, t):
    oracle = oracles.PairOracle(fixture_corpus, lexicon)
    cfg = SelectionConfig(match_count_threshold=t)
    sel = prsa(fixture_corpus, fixture_tips, None, fixture_index, cfg, table=fixture_table)
    assert set(sel.ids) == oracles.recount_prsa(oracle, fixture_tips.ids, t, 0.5)


def test_fixture_prsa_with_preferences_equals_recount(fixture_corpus, fixture_index, fixture_table, lexicon):
    oracle = oracles.PairOracle(fixture_corpus, lexicon)
    prefs = UserPreferences("u1", (("pasta", 1.0), ("wine", 0.6)))
    tips = [t.id for t in fixture_corpus.micro_reviews]
    for thr in (0.3, 0.4, 0.5):
        cfg = SelectionConfig(match_count_threshold=2, match_threshold=thr)
        sel = prsa(fixture_corpus, tips, prefs, fixture_index, cfg, table=fixture_table)
        assert set(sel.ids) == oracles.recount_prsa(oracle, tips, 2, thr, prefs.terms)


def test_ranking_and_report_fields(fixture_corpus, fixture_index, fixture_table, fixture_tips):
    sel = prsa(fixture_corpus, fixture_tips, None, fixture_index, SelectionConfig(), table=fixture_table)
    keys = [(-r.score, -r.syntactic, -r.semantic, -r.sentiment, r.id) for r in sel.selected]
    assert keys == sorted(keys)
    for r in sel.all_scores:
        assert 0 <= r.match_count <= len(fixture_tips)
        assert r.coverage == r.match_count / len(fixture_tips)
        assert 0.0 <= r.efficiency <= 1.0 and 0.0 <= r.score <= 1.0
        assert r.score == pytest.approx(sum(v for _, v in r.per_tip) / len(fixture_tips))
    d = sel.to_dict()
    assert set(d) == {"tips", "selected", "rejected_count"}
    assert set(d["selected"][0]) == {"id", "match_count", "coverage", "efficiency", "score", "merged_scores_per_tip"}


def test_empty_preferences_match_no_preferences(fixture_corpus, fixture_index, fixture_table, fixture_tips):
    a = prsa(fixture_corpus, fixture_tips, None, fixture_index, SelectionConfig(), table=fixture_table)
    b = prsa(fixture_corpus, fixture_tips, UserPreferences("u9"), fixture_index, SelectionConfig(), table=fixture_table)
    assert a == b


def test_jobs_do_not_change_output(fixture_corpus, fixture_index, fixture_tips):
    a = prsa(fixture_corpus, fixture_tips, None, fixture_index, SelectionConfig(), jobs=1)
    b = prsa(fixture_corpus, fixture_tips, None, fixture_index, SelectionConfig(), jobs=3)
    assert a == b


def test_efficiency_field_matches_scalar_path(fixture_corpus, fixture_index, fixture_table, fixture_tips):
    cfg = SelectionConfig()
    sel = prsa(fixture_corpus, fixture_tips, None, fixture_index, cfg, table=fixture_table)
    for r, score in zip(fixture_corpus.reviews, sel.all_scores):
        assert score.efficiency == pytest.approx(review_efficiency(r, fixture_tips, fixture_index, cfg))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 500))
def test_selection_shrinks_with_t_and_threshold(seed):
    c = generate_fixture(seed, 10, 6, 60)
    idx = build_index(c)
    table = build_pair_table(c, idx)
    tips = [t.id for t in c.micro_reviews]
    prev = None
    for t in (1, 2, 3):
        ids = set(prsa(c, tips, None, idx, SelectionConfig(match_count_threshold=t), table=table).ids)
        assert prev is None or ids <= prev
        prev = ids
    prev = None
    for thr in (0.3, 0.5, 0.6, 0.7, 0.9):
        ids = set(prsa(c, tips, None, idx, SelectionConfig(match_threshold=thr), table=table).ids)
        assert prev is None or ids <= prev
        prev = ids


# -- per-review coverage and efficiency ------------------------------------

def test_review_coverage_examples():
    M = CoverageMatrix.from_rows([[{0, 1}], [{0, 1}], [{1}], [set()], [set()]], 3)
    assert review_coverage("r3", ["t1", "t2"], M) == 0
    assert review_coverage("r2", ["t1", "t2", "t3"], M) == 1
    assert review_coverage("r1", ["t1", "t2", "t3", "t4", "t5"], M) == pytest.approx(0.4)


def test_review_efficiency_examples(pipeline, lexicon):
    c = small_corpus(pipeline, [
        "Zorb. Zorb. Zorb. Quux. Blat.",
        "Zorb zorb.",
        "Quux blat.",
        "Wine list.",
    ], ["Zorb."])
    idx = build_index(c, lexicon)
    assert review_efficiency(c.reviews[0], ["t1"], idx, SYN_ONLY) == pytest.approx(0.6)
    assert review_efficiency(c.reviews[1], ["t1"], idx, SYN_ONLY) == 1.0
    assert review_efficiency(c.reviews[2], ["t1"], idx, SYN_ONLY) == 0.0


def test_review_efficiency_needs_sentences(pipeline, lexicon):
    c = small_corpus(pipeline, ["The.", "Pizza."], ["Pizza."])
    idx = build_index(c, lexicon)
    with pytest.raises(SelectionError):
        review_efficiency(c.reviews[0], ["t1"], idx, SelectionConfig())
