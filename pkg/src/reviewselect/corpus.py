"""Reviews, tips, preferences, and their JSON Lines ingestion.

A :class:`Corpus` covers exactly one venue. Every document in it is
preprocessed through the same pipeline, and all documents share one
vocabulary of stems, numbered in first-seen order (reviews first, then
tips).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .porter import stem
from .textprep import PreprocessPipeline, preprocess

MAX_TIP_CHARS = 140


class CorpusError(ValueError):
    """Invalid input data: malformed line, over-length tip, duplicate id."""


@dataclass(frozen=True)
class Sentence:
    index: int
    tokens: tuple[int, ...]
    raw_span: tuple[int, int]


@dataclass(frozen=True)
class Review:
    id: str
    venue_id: str
    raw_text: str
    sentences: tuple[Sentence, ...]
    user_id: str | None = None
    rating: float | None = None


@dataclass(frozen=True)
class MicroReview:
    id: str
    venue_id: str
    raw_text: str
    sentences: tuple[Sentence, ...]

    def __post_init__(self):
        if len(self.raw_text) > MAX_TIP_CHARS:
            raise CorpusError(
                f"tip {self.id!r} has {len(self.raw_text)} characters (limit {MAX_TIP_CHARS})"
            )


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...] = ()
    _ids: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_ids", {t: i for i, t in enumerate(self.terms)})

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self._ids

    def id_of(self, term: str) -> int | None:
        return self._ids.get(term)

    def term(self, term_id: int) -> str:
        return self.terms[term_id]


@dataclass(frozen=True)
class Corpus:
    venue_id: str
    reviews: tuple[Review, ...]
    micro_reviews: tuple[MicroReview, ...]
    vocabulary: Vocabulary

    @property
    def n_reviews(self) -> int:
        return len(self.reviews)

    @property
    def n_micro_reviews(self) -> int:
        return len(self.micro_reviews)

    def review(self, review_id: str) -> Review:
        for r in self.reviews:
            if r.id == review_id:
                return r
        raise KeyError(review_id)

    def tip(self, tip_id: str) -> MicroReview:
        for t in self.micro_reviews:
            if t.id == tip_id:
                return t
        raise KeyError(tip_id)

    def stems(self, sentence: Sentence) -> list[str]:
        return [self.vocabulary.terms[i] for i in sentence.tokens]


@dataclass(frozen=True)
class UserPreferences:
    user_id: str = ""
    # (stem, weight) pairs; a multi-word term is space-joined stems
    terms: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        seen = set()
        for term, w in self.terms:
            if not 0.0 < w <= 1.0:
                raise CorpusError(f"preference weight for {term!r} must be in (0, 1], got {w}")
            if term in seen:
                raise CorpusError(f"duplicate preference term {term!r}")
            seen.add(term)

    def __bool__(self) -> bool:
        return bool(self.terms)

    @classmethod
    def from_pairs(cls, user_id: str, pairs: Iterable[tuple[str, float]]) -> UserPreferences:
        """Build from possibly repeated terms, keeping each term's maximum weight."""
        best: dict[str, float] = {}
        for term, w in pairs:
            w = float(w)
            if not 0.0 < w <= 1.0:
                raise CorpusError(f"preference weight for {term!r} must be in (0, 1], got {w}")
            best[term] = max(w, best.get(term, 0.0))
        return cls(user_id, tuple(best.items()))


@dataclass(frozen=True)
class PreferenceHistory:
    entries: tuple[tuple[float, UserPreferences], ...] = ()

    def __post_init__(self):
        stamps = [ts for ts, _ in self.entries]
        if stamps != sorted(stamps):
            raise CorpusError("preference history must be sorted by timestamp")

    def add(self, timestamp: float, prefs: UserPreferences) -> PreferenceHistory:
        entries = sorted([*self.entries, (timestamp, prefs)], key=lambda e: e[0])
        return PreferenceHistory(tuple(entries))

    def latest(self, user_id: str) -> UserPreferences | None:
        for _, p in reversed(self.entries):
            if p.user_id == user_id:
                return p
        return None


# -- building -------------------------------------------------------------

class _VocabBuilder:
    def __init__(self):
        self.ids: dict[str, int] = {}

    def sentences(self, text: str, pipeline: PreprocessPipeline) -> tuple[Sentence, ...]:
        out = []
        for seg in preprocess(text, pipeline):
            toks = tuple(self.ids.setdefault(s, len(self.ids)) for s in seg.stems)
            out.append(Sentence(len(out), toks, seg.span))
        return tuple(out)

    def vocabulary(self) -> Vocabulary:
        return Vocabulary(tuple(self.ids))


def build_corpus(
    review_records: Iterable[Mapping],
    tip_records: Iterable[Mapping],
    pipeline: PreprocessPipeline | None = None,
    venue_id: str | None = None,
) -> Corpus:
    """Preprocess raw records (dicts shaped like the JSON Lines rows) into a Corpus.

    With ``venue_id=None`` all records must share a venue; otherwise records
    of other venues are skipped.
    """
    pipeline = pipeline or PreprocessPipeline()
    review_records = list(review_records)
    tip_records = list(tip_records)
    venues = {r["venue_id"] for r in review_records} | {t["venue_id"] for t in tip_records}
    if venue_id is None:
        if len(venues) > 1:
            raise CorpusError(f"records span several venues {sorted(venues)}; pass a venue_id")
        venue_id = next(iter(venues), "")
    else:
        review_records = [r for r in review_records if r["venue_id"] == venue_id]
        tip_records = [t for t in tip_records if t["venue_id"] == venue_id]

    seen: set[str] = set()

    def check_id(doc_id: str) -> None:
        if doc_id in seen:
            raise CorpusError(f"duplicate document id {doc_id!r}")
        seen.add(doc_id)

    vb = _VocabBuilder()
    reviews = []
    for rec in review_records:
        check_id(rec["id"])
        reviews.append(Review(
            id=rec["id"],
            venue_id=rec["venue_id"],
            raw_text=rec["text"],
            sentences=vb.sentences(rec["text"], pipeline),
            user_id=rec.get("user_id"),
            rating=rec.get("rating"),
        ))
    tips = []
    for rec in tip_records:
        check_id(rec["id"])
        if len(rec["text"]) > MAX_TIP_CHARS:
            raise CorpusError(
                f"tip {rec['id']!r} has {len(rec['text'])} characters (limit {MAX_TIP_CHARS})"
            )
        tips.append(MicroReview(rec["id"], rec["venue_id"], rec["text"], vb.sentences(rec["text"], pipeline)))
    return Corpus(venue_id, tuple(reviews), tuple(tips), vb.vocabulary())


# -- files ----------------------------------------------------------------

_REVIEW_FIELDS = {"id": str, "venue_id": str, "text": str}


def _read_jsonl(path: str | Path, kind: str) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from None
            if not isinstance(rec, dict):
                raise CorpusError(f"{path}:{lineno}: expected a JSON object")
            for key, typ in _REVIEW_FIELDS.items():
                if not isinstance(rec.get(key), typ):
                    raise CorpusError(f"{path}:{lineno}: {kind} field {key!r} missing or not a string")
            if kind == "review":
                uid = rec.get("user_id")
                if uid is not None and not isinstance(uid, str):
                    raise CorpusError(f"{path}:{lineno}: user_id must be a string")
                rating = rec.get("rating")
                if rating is not None and (
                    isinstance(rating, bool) or not isinstance(rating, (int, float)) or not 1 <= rating <= 5
                ):
                    raise CorpusError(f"{path}:{lineno}: rating must be a number in [1, 5]")
            records.append(rec)
    return records


def load_corpus(
    reviews_path: str | Path,
    tips_path: str | Path,
    pipeline: PreprocessPipeline | None = None,
    venue_id: str | None = None,
) -> Corpus:
    """Load reviews and tips from JSON Lines files, preserving file order."""
    reviews = _read_jsonl(reviews_path, "review")
    tips = _read_jsonl(tips_path, "tip")
    return build_corpus(reviews, tips, pipeline, venue_id)


def review_record(r: Review) -> dict:
    rec = {"id": r.id, "venue_id": r.venue_id}
    if r.user_id is not None:
        rec["user_id"] = r.user_id
    rec["text"] = r.raw_text
    if r.rating is not None:
        rec["rating"] = r.rating
    return rec


def tip_record(t: MicroReview) -> dict:
    return {"id": t.id, "venue_id": t.venue_id, "text": t.raw_text}


def dump_corpus(corpus: Corpus, reviews_path: str | Path, tips_path: str | Path) -> None:
    """Write the corpus back out as the two JSON Lines files it loads from."""
    with open(reviews_path, "w", encoding="utf-8") as fh:
        for r in corpus.reviews:
            fh.write(json.dumps(review_record(r), ensure_ascii=False) + "\n")
    with open(tips_path, "w", encoding="utf-8") as fh:
        for t in corpus.micro_reviews:
            fh.write(json.dumps(tip_record(t), ensure_ascii=False) + "\n")


def corpus_to_dict(corpus: Corpus) -> dict:
    """JSON-ready snapshot: raw records plus the preprocessed sentences and vocabulary."""

    def sents(doc):
        return [{"tokens": list(s.tokens), "span": list(s.raw_span)} for s in doc.sentences]

    return {
        "venue_id": corpus.venue_id,
        "vocabulary": list(corpus.vocabulary.terms),
        "reviews": [{**review_record(r), "sentences": sents(r)} for r in corpus.reviews],
        "tips": [{**tip_record(t), "sentences": sents(t)} for t in corpus.micro_reviews],
    }


def corpus_from_dict(data: Mapping, pipeline: PreprocessPipeline | None = None) -> Corpus:
    """Rebuild from :func:`corpus_to_dict` output by re-running preprocessing on the raw text."""
    return build_corpus(data["reviews"], data["tips"], pipeline, data.get("venue_id") or None)


def load_preferences(path: str | Path, pipeline: PreprocessPipeline | None = None) -> UserPreferences:
    """Read a preferences object; terms are stemmed and deduplicated (max weight wins)."""
    pipeline = pipeline or PreprocessPipeline()
    try:
        data = json.loads(Path(path).read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusError(f"{path}: malformed JSON ({exc.msg})") from None
    if not isinstance(data, dict) or not isinstance(data.get("terms", []), list):
        raise CorpusError(f"{path}: expected an object with a 'terms' list")
    pairs = []
    for entry in data.get("terms", []):
        try:
            term, weight = entry["term"], entry["weight"]
        except (TypeError, KeyError):
            raise CorpusError(f"{path}: each term needs 'term' and 'weight'") from None
        if isinstance(weight, bool) or not isinstance(weight, (int, float)):
            raise CorpusError(f"{path}: weight for {term!r} is not a number")
        if not 0.0 < weight <= 1.0:
            raise CorpusError(f"{path}: weight for {term!r} must be in (0, 1], got {weight}")
        normalized = pipeline.stem_term(str(term))
        if normalized is not None:
            pairs.append((normalized, weight))
    return UserPreferences.from_pairs(str(data.get("user_id", "")), pairs)


# -- fixtures -------------------------------------------------------------

def fixture_paths() -> tuple[Path, Path]:
    """Paths of the bundled 20-review / 10-tip fixture."""
    base = resources.files("reviewselect").joinpath("resources/fixture")
    return Path(str(base.joinpath("reviews.jsonl"))), Path(str(base.joinpath("tips.jsonl")))


def load_fixture(pipeline: PreprocessPipeline | None = None) -> Corpus:
    return load_corpus(*fixture_paths(), pipeline=pipeline)


_SYLLABLES_ON = "bdfgklmnprstvz"
_SYLLABLES_NU = "aiou"
_SENTIMENT_WORDS = ("great", "lovely", "fresh", "tasty", "friendly", "bad", "awful", "slow", "rude", "bland")
_FILLER = ("the", "was", "and", "very", "with", "a", "is")


def _pseudo_words(rng: random.Random, n: int, stopwords: frozenset[str]) -> list[str]:
    words: list[str] = []
    seen: set[str] = set()
    while len(words) < n:
        w = "".join(rng.choice(_SYLLABLES_ON) + rng.choice(_SYLLABLES_NU) for _ in range(rng.randint(2, 3)))
        w += rng.choice("kmnrt")
        # keep only words that are their own stem so generated text maps 1:1 onto terms
        if w in seen or w in stopwords or stem(w) != w:
            continue
        seen.add(w)
        words.append(w)
    return words


def generate_fixture(
    seed: int,
    n_reviews: int,
    n_tips: int,
    vocab_size: int,
    pipeline: PreprocessPipeline | None = None,
    n_users: int = 3,
) -> Corpus:
    """Deterministic synthetic venue corpus.

    Words are drawn from topic clusters; every tip borrows at least one word
    from a review sentence, so each tip overlaps some review.
    """
    if min(n_reviews, n_tips, vocab_size) <= 0:
        raise ValueError("n_reviews, n_tips and vocab_size must be positive")
    pipeline = pipeline or PreprocessPipeline()
    rng = random.Random(seed)
    words = _pseudo_words(rng, vocab_size, pipeline.stopwords)
    n_topics = max(2, vocab_size // 8)
    topics = [words[i::n_topics] for i in range(n_topics)]
    topics = [t for t in topics if t]

    def sentence(topic: list[str], inject: list[str] = ()) -> list[str]:
        toks = [rng.choice(topic) for _ in range(rng.randint(2, 5))]
        toks.extend(inject)
        if rng.random() < 0.5:
            toks.insert(rng.randrange(len(toks) + 1), rng.choice(_SENTIMENT_WORDS))
        if rng.random() < 0.5:
            toks.insert(rng.randrange(len(toks) + 1), rng.choice(_FILLER))
        return toks

    reviews = []
    review_sents: list[list[str]] = []
    for i in range(n_reviews):
        sents = []
        for _ in range(rng.randint(1, 4)):
            toks = sentence(rng.choice(topics))
            review_sents.append(toks)
            sents.append(" ".join(toks).capitalize() + rng.choice(".!."))
        reviews.append({
            "id": f"r{i + 1}",
            "venue_id": f"syn{seed}",
            "user_id": f"u{rng.randrange(n_users) + 1}",
            "text": " ".join(sents),
            "rating": rng.randint(1, 5),
        })

    tips = []
    for i in range(n_tips):
        src = rng.choice(review_sents)
        anchor = rng.choice([w for w in src if w in words] or src)
        topic = next((t for t in topics if anchor in t), rng.choice(topics))
        n_sent = 1 if rng.random() < 0.7 else 2
        while True:
            parts = [sentence(topic, [anchor])]
            parts += [sentence(rng.choice(topics)) for _ in range(n_sent - 1)]
            text = " ".join(" ".join(p).capitalize() + "." for p in parts)
            if len(text) <= MAX_TIP_CHARS:
                break
            n_sent = 1
        tips.append({"id": f"t{i + 1}", "venue_id": f"syn{seed}", "text": text})

    return build_corpus(reviews, tips, pipeline)
