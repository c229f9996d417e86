"""Corpus statistics: TF-IDF vectors, smoothed term distributions, polarity, user profiles.

idf uses the natural log without smoothing, ``ln(N / df)`` with ``N`` the
number of reviews plus tips; every indexed term has ``df >= 1``. Term
frequency is the raw count divided by the document (or sentence) length.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import Corpus, CorpusError, Review, UserPreferences
from .textprep import PreprocessPipeline

UNCATEGORIZED = "uncategorized"
DEFAULT_SMOOTHING = 0.1

TfIdfVector = dict  # TermId -> positive weight; zero weights are never stored


@dataclass(frozen=True)
class TermDistribution:
    probs: np.ndarray
    smoothing: float

    def __array__(self, dtype=None, copy=None):
        return self.probs if dtype is None else self.probs.astype(dtype)

    def __len__(self) -> int:
        return len(self.probs)


def term_distribution(tokens: Sequence[int], vocab_size: int, smoothing: float = DEFAULT_SMOOTHING) -> TermDistribution:
    """Additively smoothed unigram distribution over the vocabulary."""
    if vocab_size <= 0:
        raise ValueError("vocab_size must be positive")
    if smoothing <= 0:
        raise ValueError("smoothing must be positive")
    counts = np.bincount(np.asarray(tokens, dtype=np.int64), minlength=vocab_size).astype(float)
    probs = (counts + smoothing) / (len(tokens) + smoothing * vocab_size)
    return TermDistribution(probs, smoothing)


@dataclass(frozen=True)
class PolarityLexicon:
    scores: Mapping[str, int]

    def __post_init__(self):
        bad = {s for s, v in self.scores.items() if v not in (-1, 1)}
        if bad:
            raise ValueError(f"lexicon scores must be +1 or -1: {sorted(bad)}")

    @classmethod
    def from_lists(cls, positive: Iterable[str], negative: Iterable[str]) -> PolarityLexicon:
        pos, neg = set(positive), set(negative)
        clash = pos & neg
        if clash:
            raise ValueError(f"stems listed as both positive and negative: {sorted(clash)}")
        return cls({**{s: 1 for s in pos}, **{s: -1 for s in neg}})


def load_lexicon(directory: str | Path | None = None) -> PolarityLexicon:
    """Read ``positive.txt`` and ``negative.txt`` (one stem per line); ``None`` = bundled."""
    if directory is None:
        base = resources.files("reviewselect").joinpath("resources")
        read = lambda name: base.joinpath(name).read_text("utf-8")  # noqa: E731
    else:
        read = lambda name: (Path(directory) / name).read_text("utf-8")  # noqa: E731

    def words(name):
        return [w.strip() for w in read(name).splitlines() if w.strip()]

    return PolarityLexicon.from_lists(words("positive.txt"), words("negative.txt"))


def polarity(stems: Iterable[str], lexicon: PolarityLexicon) -> float:
    """(pos - neg) / max(1, pos + neg) over lexicon hits."""
    pos = neg = 0
    for s in stems:
        v = lexicon.scores.get(s)
        if v == 1:
            pos += 1
        elif v == -1:
            neg += 1
    return (pos - neg) / max(1, pos + neg)


def tfidf_vector(tokens: Sequence[int], idf: np.ndarray) -> TfIdfVector:
    if not tokens:
        return {}
    n = len(tokens)
    vec = {}
    for term, c in sorted(Counter(tokens).items()):
        w = (c / n) * idf[term]
        if w > 0:
            vec[term] = w
    return vec


def cosine(u: Mapping[int, float], v: Mapping[int, float]) -> float:
    """Cosine of two sparse vectors, 0 when either is all-zero; clipped to [0, 1]."""
    if not u or not v:
        return 0.0
    if len(u) > len(v):
        u, v = v, u
    dot = sum(w * v.get(t, 0.0) for t, w in u.items())
    nu = math.sqrt(sum(w * w for w in u.values()))
    nv = math.sqrt(sum(w * w for w in v.values()))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return min(1.0, max(0.0, dot / (nu * nv)))


@dataclass(frozen=True)
class Index:
    corpus: Corpus
    df: np.ndarray
    idf: np.ndarray
    review_vectors: tuple[TfIdfVector, ...]
    tip_vectors: tuple[TfIdfVector, ...]
    lexicon: PolarityLexicon
    smoothing: float = DEFAULT_SMOOTHING
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_documents(self) -> int:
        return self.corpus.n_reviews + self.corpus.n_micro_reviews

    @property
    def vocab_size(self) -> int:
        return len(self.corpus.vocabulary)

    def stems(self, tokens: Iterable[int]) -> list[str]:
        terms = self.corpus.vocabulary.terms
        return [terms[t] for t in tokens]

    def _cached(self, kind: str, tokens: tuple[int, ...], make):
        key = (kind, tokens)
        try:
            return self._cache[key]
        except KeyError:
            val = self._cache[key] = make()
            return val

    def vector(self, tokens: Sequence[int]) -> TfIdfVector:
        tokens = tuple(tokens)
        return self._cached("vec", tokens, lambda: tfidf_vector(tokens, self.idf))

    def distribution(self, tokens: Sequence[int]) -> TermDistribution:
        tokens = tuple(tokens)
        return self._cached("dist", tokens, lambda: term_distribution(tokens, self.vocab_size, self.smoothing))

    def polarity(self, tokens: Sequence[int]) -> float:
        tokens = tuple(tokens)
        return self._cached("pol", tokens, lambda: polarity(self.stems(tokens), self.lexicon))


def _doc_tokens(doc) -> list[int]:
    return [t for s in doc.sentences for t in s.tokens]


def build_index(
    corpus: Corpus,
    lexicon: PolarityLexicon | None = None,
    smoothing: float = DEFAULT_SMOOTHING,
) -> Index:
    """Document frequencies and document TF-IDF vectors; sentence data is precomputed."""
    n_docs = corpus.n_reviews + corpus.n_micro_reviews
    if n_docs == 0:
        raise CorpusError("cannot index a corpus with no documents")
    if smoothing <= 0:
        raise ValueError("smoothing must be positive")
    lexicon = lexicon or load_lexicon()
    V = len(corpus.vocabulary)
    df = np.zeros(V, dtype=np.int64)
    docs = [*corpus.reviews, *corpus.micro_reviews]
    for doc in docs:
        for t in set(_doc_tokens(doc)):
            df[t] += 1
    with np.errstate(divide="ignore"):
        idf = np.where(df > 0, np.log(n_docs / np.maximum(df, 1)), 0.0)
    idf.setflags(write=False)
    df.setflags(write=False)
    index = Index(
        corpus=corpus,
        df=df,
        idf=idf,
        review_vectors=tuple(tfidf_vector(_doc_tokens(r), idf) for r in corpus.reviews),
        tip_vectors=tuple(tfidf_vector(_doc_tokens(t), idf) for t in corpus.micro_reviews),
        lexicon=lexicon,
        smoothing=smoothing,
    )
    for doc in docs:
        for s in doc.sentences:
            index.vector(s.tokens)
            index.distribution(s.tokens)
            index.polarity(s.tokens)
    return index


# -- profiles -------------------------------------------------------------

@dataclass(frozen=True)
class UserProfile:
    user_id: str
    histogram: Mapping[str, int]
    keywords: tuple[str, ...]
    category: str
    tfidf_centroid: TfIdfVector


def extract_keywords(histogram: Mapping[str, int], k: int) -> list[str]:
    """Top ``k`` stems by count, ties broken alphabetically."""
    if k <= 0:
        raise ValueError("k must be positive")
    return [s for s, _ in sorted(histogram.items(), key=lambda kv: (-kv[1], kv[0]))[:k]]


def load_categories(path: str | Path | None = None, pipeline: PreprocessPipeline | None = None) -> dict[str, list[str]]:
    """Read ``{name: [seed terms]}`` and stem the seeds; ``None`` loads the bundled set."""
    pipeline = pipeline or PreprocessPipeline()
    if path is None:
        text = resources.files("reviewselect").joinpath("resources/categories.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    raw = json.loads(text)
    if not isinstance(raw, dict):
        raise CorpusError("categories file must be a JSON object of name -> term list")
    out = {}
    for name, seeds in raw.items():
        stems = [s for s in (pipeline.stem_term(str(x)) for x in seeds) if s]
        if not stems:
            raise CorpusError(f"category {name!r} has no usable seed terms")
        out[str(name)] = list(dict.fromkeys(stems))
    return out


def build_profile(
    user_reviews: Sequence[Review],
    categories: Mapping[str, Sequence[str]],
    index: Index,
    k: int = 5,
) -> UserProfile:
    """Keyword histogram, top-k keywords, and a category by cosine to binary seed vectors."""
    if not user_reviews:
        raise CorpusError("a profile needs at least one review")
    for name, seeds in categories.items():
        if not seeds:
            raise CorpusError(f"category {name!r} has no seed terms")
    vocab = index.corpus.vocabulary
    hist: Counter[str] = Counter()
    centroid: dict[int, float] = {}
    for r in user_reviews:
        toks = _doc_tokens(r)
        hist.update(index.stems(toks))
        for t, w in tfidf_vector(toks, index.idf).items():
            centroid[t] = centroid.get(t, 0.0) + w / len(user_reviews)

    best, best_score = UNCATEGORIZED, 0.0
    for name in sorted(categories):
        seed_ids = {vocab.id_of(s) for s in categories[name]}
        seed_vec_norm = math.sqrt(len(set(categories[name])))
        seed_vec = {i: 1.0 for i in seed_ids if i is not None}
        score = 0.0
        if seed_vec and centroid:
            dot = sum(centroid.get(i, 0.0) for i in seed_vec)
            norm = math.sqrt(sum(w * w for w in centroid.values()))
            score = dot / (norm * seed_vec_norm)
        if score > best_score:
            best, best_score = name, score

    user_id = user_reviews[0].user_id or ""
    return UserProfile(user_id, dict(hist), tuple(extract_keywords(hist, k)), best, centroid)


def profile_to_preferences(profile: UserProfile) -> UserPreferences:
    """Top keywords as preference terms, weighted by count relative to the most frequent."""
    if not profile.keywords:
        return UserPreferences(profile.user_id)
    top = max(profile.histogram[s] for s in profile.keywords)
    return UserPreferences(
        profile.user_id,
        tuple((s, profile.histogram[s] / top) for s in profile.keywords),
    )
