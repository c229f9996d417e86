"""Sentence-vs-tip similarity: TF-IDF cosine, 1 - JSD, polarity product, and their merge.

The per-pair functions here are the reference definitions. :func:`pairwise_scores`
computes the same quantities for every (tip sentence, review sentence) pair
at once and is what the selection code uses.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .corpus import Sentence, UserPreferences
from .indexing import Index, cosine

# slack on the threshold comparison so both scoring routes agree on exact ties
MATCH_EPS = 1e-9


@dataclass(frozen=True)
class MergeWeights:
    syntactic: float = 1.0
    semantic: float = 1.0
    sentiment: float = 1.0

    def __post_init__(self):
        ws = (self.syntactic, self.semantic, self.sentiment)
        if min(ws) < 0 or sum(ws) <= 0:
            raise ValueError("merge weights must be nonnegative with a positive sum")

    @property
    def total(self) -> float:
        return self.syntactic + self.semantic + self.sentiment


@dataclass(frozen=True)
class SimilarityScores:
    syntactic: float
    semantic: float
    sentiment: float
    merged: float
    matched: bool


def _tokens(x) -> tuple[int, ...]:
    return x.tokens if isinstance(x, Sentence) else tuple(x)


def syntactic_sim(s, mr, index: Index) -> float:
    return cosine(index.vector(_tokens(s)), index.vector(_tokens(mr)))


def jsd(p, q) -> float:
    """Jensen-Shannon divergence with base-2 logs, so the value lies in [0, 1]."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"distribution lengths differ: {p.shape} vs {q.shape}")
    s = p + q

    def kl(a):
        # a / m written as 2a / (p + q), which cannot underflow to a / 0
        nz = a > 0
        return float(np.sum(a[nz] * np.log2(2.0 * a[nz] / s[nz])))

    return min(1.0, max(0.0, 0.5 * kl(p) + 0.5 * kl(q)))


def semantic_sim(s, mr, index: Index) -> float:
    return 1.0 - jsd(index.distribution(_tokens(s)), index.distribution(_tokens(mr)))


def sentiment_sim(s, mr, index: Index) -> float:
    return index.polarity(_tokens(s)) * index.polarity(_tokens(mr))


def preference_overlap(prefs: UserPreferences, stems: Iterable[str]) -> float:
    """Weighted fraction of preference terms present among ``stems``."""
    total = sum(w for _, w in prefs.terms)
    if total == 0:
        return 0.0
    present = set(stems)
    hit = sum(w for term, w in prefs.terms if all(part in present for part in term.split()))
    return hit / total


def preference_boost(prefs: UserPreferences | None, stems: Iterable[str]) -> float:
    if not prefs:
        return 1.0
    return 0.5 + 0.5 * preference_overlap(prefs, stems)


def merge_scores(sim1: float, sim2: float, sim3: float, weights: MergeWeights = MergeWeights()) -> float:
    """Weighted mean with the polarity product rescaled from [-1, 1] to [0, 1]."""
    raw = weights.syntactic * sim1 + weights.semantic * sim2 + weights.sentiment * (sim3 + 1.0) / 2.0
    return raw / weights.total


def merge_and_match(
    sim1: float,
    sim2: float,
    sim3: float,
    prefs: UserPreferences | None,
    stems: Iterable[str],
    threshold: float,
    weights: MergeWeights = MergeWeights(),
) -> tuple[float, bool]:
    merged = merge_scores(sim1, sim2, sim3, weights) * preference_boost(prefs, stems)
    merged = min(1.0, max(0.0, merged))
    return merged, merged >= threshold - MATCH_EPS


def score_pair(
    s: Sentence,
    mr: Sentence,
    index: Index,
    threshold: float,
    prefs: UserPreferences | None = None,
    weights: MergeWeights = MergeWeights(),
) -> SimilarityScores:
    """All three similarities for a review sentence ``s`` against a tip sentence ``mr``."""
    a = syntactic_sim(s, mr, index)
    b = semantic_sim(s, mr, index)
    c = sentiment_sim(s, mr, index)
    merged, matched = merge_and_match(a, b, c, prefs, index.stems(s.tokens), threshold, weights)
    return SimilarityScores(a, b, c, merged, matched)


def f_score(r, mr) -> int:
    """Histogram intersection: sum over terms of min(count in r, count in mr)."""
    cr = Counter(t for s in r.sentences for t in s.tokens)
    cm = Counter(t for s in mr.sentences for t in s.tokens)
    return sum(min(c, cm[t]) for t, c in cr.items() if t in cm)


def rank_candidates(candidates: Iterable[tuple[str, float, float, float, float]]) -> list[tuple]:
    """Sort by merged, sim1, sim2, sim3 (all descending), then id ascending."""
    return sorted(candidates, key=lambda c: (-c[1], -c[2], -c[3], -c[4], c[0]))


# -- vectorized -----------------------------------------------------------

@dataclass(frozen=True)
class PairScores:
    """Similarity arrays of shape (tip sentences, review sentences)."""

    syntactic: np.ndarray
    semantic: np.ndarray
    sentiment: np.ndarray

    def merged(self, weights: MergeWeights = MergeWeights(), boost: np.ndarray | None = None) -> np.ndarray:
        m = (
            weights.syntactic * self.syntactic
            + weights.semantic * self.semantic
            + weights.sentiment * (self.sentiment + 1.0) / 2.0
        ) / weights.total
        if boost is not None:
            m = m * boost[None, :]
        return np.clip(m, 0.0, 1.0)


def _dense_unit_vectors(index: Index, sentences: Sequence[Sentence]) -> np.ndarray:
    mat = np.zeros((len(sentences), index.vocab_size))
    for i, s in enumerate(sentences):
        for t, w in index.vector(s.tokens).items():
            mat[i, t] = w
    norms = np.sqrt((mat * mat).sum(axis=1))
    nz = norms > 0
    mat[nz] /= norms[nz, None]
    return mat


def _jsd_rows(q: np.ndarray, P: np.ndarray) -> np.ndarray:
    """JSD of distribution ``q`` against each row of ``P`` (all entries positive)."""
    M = 0.5 * (P + q[None, :])
    kl_p = np.sum(P * np.log2(P / M), axis=1)
    kl_q = np.sum(q[None, :] * np.log2(q[None, :] / M), axis=1)
    return np.clip(0.5 * kl_p + 0.5 * kl_q, 0.0, 1.0)


def pairwise_scores(
    index: Index,
    tip_sentences: Sequence[Sentence],
    review_sentences: Sequence[Sentence],
    jobs: int = 1,
) -> PairScores:
    n_t, n_r = len(tip_sentences), len(review_sentences)
    if n_t == 0 or n_r == 0:
        z = np.zeros((n_t, n_r))
        return PairScores(z, z.copy(), z.copy())
    A = _dense_unit_vectors(index, tip_sentences)
    B = _dense_unit_vectors(index, review_sentences)
    P = np.vstack([index.distribution(s.tokens).probs for s in review_sentences])
    Q = np.vstack([index.distribution(s.tokens).probs for s in tip_sentences])
    pol_r = np.array([index.polarity(s.tokens) for s in review_sentences])
    pol_t = np.array([index.polarity(s.tokens) for s in tip_sentences])

    syn = np.empty((n_t, n_r))
    sem = np.empty((n_t, n_r))

    def fill(i: int) -> None:
        syn[i] = np.clip(B @ A[i], 0.0, 1.0)
        sem[i] = 1.0 - _jsd_rows(Q[i], P)

    # rows are independent, so the worker count cannot change the result
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(fill, range(n_t)))
    else:
        for i in range(n_t):
            fill(i)
    return PairScores(syn, sem, np.outer(pol_t, pol_r))
