"""Independent reference computations used as test oracles.

Everything here works from stem strings and plain Python math; nothing
touches the package's Index, numpy arrays or vectorized paths.
"""

from __future__ import annotations

import math
from collections import Counter
from itertools import combinations


def doc_stems(doc, corpus) -> list[str]:
    return [corpus.vocabulary.terms[t] for s in doc.sentences for t in s.tokens]


def sent_stems(sentence, corpus) -> list[str]:
    return [corpus.vocabulary.terms[t] for t in sentence.tokens]


def idf_table(corpus) -> dict[str, float]:
    docs = [*corpus.reviews, *corpus.micro_reviews]
    n = len(docs)
    df = Counter()
    for d in docs:
        df.update(set(doc_stems(d, corpus)))
    return {w: math.log(n / c) for w, c in df.items()}


def tfidf(stems: list[str], idf: dict[str, float]) -> dict[str, float]:
    if not stems:
        return {}
    c = Counter(stems)
    return {w: k / len(stems) * idf[w] for w, k in c.items() if k / len(stems) * idf[w] > 0}


def cos(u: dict, v: dict) -> float:
    if not u or not v:
        return 0.0
    dot = sum(u[w] * v[w] for w in u if w in v)
    nu = math.sqrt(sum(x * x for x in u.values()))
    nv = math.sqrt(sum(x * x for x in v.values()))
    return min(1.0, max(0.0, dot / (nu * nv)))


def smoothed(stems: list[str], vocab: list[str], eps: float) -> list[float]:
    c = Counter(stems)
    denom = len(stems) + eps * len(vocab)
    return [(c[w] + eps) / denom for w in vocab]


def js_divergence(p: list[float], q: list[float]) -> float:
    total = 0.0
    for a, b in zip(p, q):
        if a > 0:
            total += 0.5 * a * math.log2(2 * a / (a + b))
        if b > 0:
            total += 0.5 * b * math.log2(2 * b / (a + b))
    return total


def polarity_of(stems: list[str], pos: set[str], neg: set[str]) -> float:
    p = sum(s in pos for s in stems)
    n = sum(s in neg for s in stems)
    return (p - n) / max(1, p + n)


class PairOracle:
    """Scalar per-pair similarity built from scratch for one corpus."""

    def __init__(self, corpus, lexicon, eps=0.1, weights=(1.0, 1.0, 1.0)):
        self.corpus = corpus
        self.idf = idf_table(corpus)
        self.vocab = list(corpus.vocabulary.terms)
        self.eps = eps
        self.weights = weights
        self.pos = {s for s, v in lexicon.scores.items() if v > 0}
        self.neg = {s for s, v in lexicon.scores.items() if v < 0}

    def sims(self, s_stems, t_stems):
        a = cos(tfidf(s_stems, self.idf), tfidf(t_stems, self.idf))
        jsd = js_divergence(smoothed(s_stems, self.vocab, self.eps), smoothed(t_stems, self.vocab, self.eps))
        b = 1.0 - min(1.0, max(0.0, jsd))
        c = polarity_of(s_stems, self.pos, self.neg) * polarity_of(t_stems, self.pos, self.neg)
        return a, b, c

    def merged(self, s_stems, t_stems, prefs=None):
        a, b, c = self.sims(s_stems, t_stems)
        w1, w2, w3 = self.weights
        m = (w1 * a + w2 * b + w3 * (c + 1) / 2) / (w1 + w2 + w3)
        if prefs:
            total = sum(w for _, w in prefs)
            present = set(s_stems)
            hit = sum(w for term, w in prefs if all(x in present for x in term.split()))
            m *= 0.5 + 0.5 * hit / total
        return min(1.0, max(0.0, m))

    def review_tip_matches(self, review, tip, threshold, prefs=None) -> bool:
        return any(
            self.merged(sent_stems(s, self.corpus), sent_stems(ts, self.corpus), prefs) >= threshold - 1e-9
            for s in review.sentences for ts in tip.sentences
        )


def recount_prsa(oracle: PairOracle, tip_ids, t, threshold, prefs=None) -> set[str]:
    """Exhaustive (review, tip) recount: reviews matching at least t selected tips."""
    corpus = oracle.corpus
    tips = [corpus.tip(i) for i in tip_ids]
    out = set()
    for r in corpus.reviews:
        count = sum(oracle.review_tip_matches(r, tip, threshold, prefs) for tip in tips)
        if count >= t:
            out.add(r.id)
    return out


# -- set-system oracles over explicit {tip: set(reviews)} maps -------------

def greedy_simulation(covers: dict[str, set], effs: dict[str, float], n_reviews: int, T: int, alpha: float, beta: float):
    """Step-by-step budgeted greedy over explicit sets, written independently."""
    chosen: list[str] = []
    covered: set = set()
    while len(chosen) < T:
        best = None
        for tip in sorted(covers):
            if tip in chosen:
                continue
            if (sum(effs[x] for x in chosen) + effs[tip]) / (len(chosen) + 1) < alpha - 1e-12:
                continue
            gain = len(covers[tip] - covered)
            cost = beta * (1 - effs[tip]) + (1 - beta)
            ratio = (float("inf") if gain > 0 else 0.0) if cost == 0 else gain / cost
            cand = (ratio, gain)
            # strict improvement only, so the alphabetically first tip keeps ties
            if best is None or cand > best[0]:
                best = (cand, tip)
        if best is None or best[0][1] == 0:
            break
        chosen.append(best[1])
        covered |= covers[best[1]]
    return chosen


def enumerate_best(covers: dict[str, set], K: int) -> int:
    best = 0
    names = sorted(covers)
    for k in range(1, min(K, len(names)) + 1):
        for combo in combinations(names, k):
            best = max(best, len(set().union(*(covers[c] for c in combo))))
    return best
