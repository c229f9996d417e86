import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reviewselect.corpus import (
    CorpusError,
    MicroReview,
    PreferenceHistory,
    UserPreferences,
    build_corpus,
    corpus_from_dict,
    corpus_to_dict,
    dump_corpus,
    fixture_paths,
    generate_fixture,
    load_corpus,
    load_preferences,
)


def write_jsonl(path, rows):
    path.write_text("".join(json.dumps(r) + "\n" for r in rows))
    return path


def test_empty_files(tmp_path, pipeline):
    c = load_corpus(write_jsonl(tmp_path / "r.jsonl", []), write_jsonl(tmp_path / "t.jsonl", []), pipeline)
    assert (c.n_reviews, c.n_micro_reviews) == (0, 0)


def test_single_review_two_sentences(tmp_path, pipeline):
    r = write_jsonl(tmp_path / "r.jsonl", [{"id": "r1", "venue_id": "v1", "text": "Great pizza. Bad service."}])
    c = load_corpus(r, write_jsonl(tmp_path / "t.jsonl", []), pipeline)
    (review,) = c.reviews
    assert len(review.sentences) == 2
    assert [c.stems(s) for s in review.sentences] == [["great", "pizza"], ["bad", "servic"]]
    assert [review.raw_text[a:b] for a, b in (s.raw_span for s in review.sentences)] == ["Great pizza.", "Bad service."]


def test_bundled_fixture_counts(fixture_corpus):
    reviews, tips = fixture_paths()
    assert fixture_corpus.n_reviews == 20 == len(reviews.read_text().splitlines())
    assert fixture_corpus.n_micro_reviews == 10 == len(tips.read_text().splitlines())
    assert fixture_corpus.venue_id == "v1"


def test_malformed_line_names_line_number(tmp_path, pipeline):
    r = tmp_path / "r.jsonl"
    r.write_text('{"id":"r1","venue_id":"v1","text":"ok"}\n{"id": "r2", oops}\n')
    with pytest.raises(CorpusError, match=r"r\.jsonl:2"):
        load_corpus(r, write_jsonl(tmp_path / "t.jsonl", []), pipeline)


@pytest.mark.parametrize("row, needle", [
    ({"id": "r1", "venue_id": "v1"}, "text"),
    ({"id": 3, "venue_id": "v1", "text": "x"}, "id"),
    ({"id": "r1", "venue_id": "v1", "text": "x", "rating": 9}, "rating"),
    ({"id": "r1", "venue_id": "v1", "text": "x", "user_id": 4}, "user_id"),
])
def test_bad_fields_rejected(tmp_path, pipeline, row, needle):
    with pytest.raises(CorpusError, match=needle):
        load_corpus(write_jsonl(tmp_path / "r.jsonl", [row]), write_jsonl(tmp_path / "t.jsonl", []), pipeline)


def test_long_tip_rejected_by_id(tmp_path, pipeline):
    t = write_jsonl(tmp_path / "t.jsonl", [{"id": "tip-long", "venue_id": "v1", "text": "x" * 141}])
    with pytest.raises(CorpusError, match="tip-long"):
        load_corpus(write_jsonl(tmp_path / "r.jsonl", []), t, pipeline)


def test_tip_of_exactly_140_chars_is_fine(pipeline):
    c = build_corpus([], [{"id": "t1", "venue_id": "v", "text": "a" * 140}], pipeline)
    assert len(c.micro_reviews[0].raw_text) == 140
    with pytest.raises(CorpusError):
        MicroReview("t2", "v", "b" * 141, ())


def test_duplicate_ids_rejected(pipeline):
    rows = [{"id": "x", "venue_id": "v", "text": "a b"}]
    with pytest.raises(CorpusError, match="duplicate"):
        build_corpus(rows * 2, [], pipeline)
    with pytest.raises(CorpusError, match="duplicate"):
        build_corpus(rows, rows, pipeline)


def test_mixed_venues_need_explicit_venue(pipeline):
    rows = [{"id": "a", "venue_id": "v1", "text": "Good food."}, {"id": "b", "venue_id": "v2", "text": "Bad food."}]
    with pytest.raises(CorpusError, match="venue"):
        build_corpus(rows, [], pipeline)
    c = build_corpus(rows, [], pipeline, venue_id="v2")
    assert [r.id for r in c.reviews] == ["b"]


def test_tokens_are_vocabulary_ids(fixture_corpus):
    V = len(fixture_corpus.vocabulary)
    for doc in [*fixture_corpus.reviews, *fixture_corpus.micro_reviews]:
        assert doc.sentences
        for s in doc.sentences:
            assert all(0 <= t < V for t in s.tokens)


def test_round_trip_through_files(tmp_path, fixture_corpus, pipeline):
    r, t = tmp_path / "r.jsonl", tmp_path / "t.jsonl"
    dump_corpus(fixture_corpus, r, t)
    assert load_corpus(r, t, pipeline) == fixture_corpus


def test_round_trip_through_dict(fixture_corpus, pipeline):
    data = json.loads(json.dumps(corpus_to_dict(fixture_corpus)))
    assert corpus_from_dict(data, pipeline) == fixture_corpus


# -- preferences ----------------------------------------------------------

def write_prefs(tmp_path, obj):
    p = tmp_path / "prefs.json"
    p.write_text(json.dumps(obj))
    return p


def test_empty_preferences(tmp_path, pipeline):
    prefs = load_preferences(write_prefs(tmp_path, {"user_id": "u1", "terms": []}), pipeline)
    assert not prefs and prefs.terms == ()


def test_single_preference_stemmed(tmp_path, pipeline):
    prefs = load_preferences(write_prefs(tmp_path, {"terms": [{"term": "pizza", "weight": 0.9}]}), pipeline)
    assert prefs.terms == (("pizza", 0.9),)


def test_duplicate_preferences_keep_max(tmp_path, pipeline):
    obj = {"user_id": "u", "terms": [
        {"term": "Pizzas", "weight": 0.3}, {"term": "pizza", "weight": 0.8}, {"term": "wine", "weight": 0.5},
    ]}
    prefs = load_preferences(write_prefs(tmp_path, obj), pipeline)
    assert dict(prefs.terms) == {"pizza": 0.8, "wine": 0.5}


@pytest.mark.parametrize("w", [0, -0.2, 1.5, "high", True])
def test_bad_weight_rejected(tmp_path, pipeline, w):
    with pytest.raises(CorpusError):
        load_preferences(write_prefs(tmp_path, {"terms": [{"term": "pizza", "weight": w}]}), pipeline)


def test_preferences_type_validates():
    with pytest.raises(CorpusError):
        UserPreferences("u", (("a", 0.5), ("a", 0.6)))
    with pytest.raises(CorpusError):
        UserPreferences("u", (("a", 0.0),))


def test_preference_history_sorted():
    a, b = UserPreferences("u1", (("pizza", 1.0),)), UserPreferences("u1", (("wine", 1.0),))
    h = PreferenceHistory().add(2.0, b).add(1.0, a)
    assert [ts for ts, _ in h.entries] == [1.0, 2.0]
    assert h.latest("u1") == b and h.latest("nobody") is None
    with pytest.raises(CorpusError):
        PreferenceHistory(((2.0, a), (1.0, b)))


# -- synthetic fixtures ---------------------------------------------------

def test_generate_fixture_deterministic(tmp_path):
    a, b = generate_fixture(1, 5, 3, 50), generate_fixture(1, 5, 3, 50)
    assert json.dumps(corpus_to_dict(a)) == json.dumps(corpus_to_dict(b))
    assert corpus_to_dict(a) != corpus_to_dict(generate_fixture(2, 5, 3, 50))


def test_generate_fixture_seed7_every_tip_overlaps_a_review():
    c = generate_fixture(7, 12, 8, 100)
    assert (c.n_reviews, c.n_micro_reviews) == (12, 8)
    review_terms = [{t for s in r.sentences for t in s.tokens} for r in c.reviews]
    for tip in c.micro_reviews:
        tip_terms = {t for s in tip.sentences for t in s.tokens}
        assert any(tip_terms & rt for rt in review_terms), tip.id


def test_generate_fixture_rejects_nonpositive():
    with pytest.raises(ValueError):
        generate_fixture(0, 0, 3, 10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 15), st.integers(1, 10), st.integers(10, 120))
def test_generated_corpora_are_valid(seed, n_r, n_t, v):
    c = generate_fixture(seed, n_r, n_t, v)
    assert (c.n_reviews, c.n_micro_reviews) == (n_r, n_t)
    assert all(len(t.raw_text) <= 140 and t.sentences for t in c.micro_reviews)
    assert all(r.sentences for r in c.reviews)
