"""Tip-to-review coverage, tip efficiency, and greedy tip subset selection.

A tip covers a review when any of its sentences matches any sentence of the
review. A tip sentence is *relevant* when it matches at least one review;
a tip's efficiency is the fraction of its sentences that are relevant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .config import SelectionConfig
from .corpus import Corpus, UserPreferences
from .indexing import Index
from .similarity import MATCH_EPS, PairScores, pairwise_scores, preference_boost

EFF_EPS = 1e-12


@dataclass(frozen=True)
class CoverageMatrix:
    """Boolean sentence-level matches of tip sentences against reviews."""

    tip_ids: tuple[str, ...]
    review_ids: tuple[str, ...]
    # (total tip sentences, reviews)
    sentence_covers: np.ndarray
    # tip i owns rows tip_rows[i][0] : tip_rows[i][1]
    tip_rows: tuple[tuple[int, int], ...]
    covers: np.ndarray = field(init=False, repr=False, compare=False)
    tip_masks: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sc = np.asarray(self.sentence_covers, dtype=bool)
        if sc.ndim != 2 or sc.shape[1] != len(self.review_ids):
            raise ValueError("sentence_covers must have one column per review")
        if len(self.tip_rows) != len(self.tip_ids):
            raise ValueError("tip_rows must have one entry per tip")
        sc.setflags(write=False)
        object.__setattr__(self, "sentence_covers", sc)
        covers = np.zeros((len(self.tip_ids), len(self.review_ids)), dtype=bool)
        for i, (a, b) in enumerate(self.tip_rows):
            if b > a:
                covers[i] = sc[a:b].any(axis=0)
        covers.setflags(write=False)
        object.__setattr__(self, "covers", covers)
        masks = tuple(sum(1 << j for j in np.flatnonzero(row)) for row in covers)
        object.__setattr__(self, "tip_masks", masks)

    @classmethod
    def from_rows(
        cls,
        rows_per_tip: Sequence[Sequence[Iterable[int]]],
        n_reviews: int,
        tip_ids: Sequence[str] | None = None,
        review_ids: Sequence[str] | None = None,
    ) -> CoverageMatrix:
        """Build from, per tip, a list of sentences, each the set of review indices it matches."""
        tip_ids = tuple(tip_ids or (f"t{i + 1}" for i in range(len(rows_per_tip))))
        review_ids = tuple(review_ids or (f"r{j + 1}" for j in range(n_reviews)))
        n_rows = sum(len(s) for s in rows_per_tip)
        sc = np.zeros((n_rows, n_reviews), dtype=bool)
        spans, r = [], 0
        for sents in rows_per_tip:
            start = r
            for matched in sents:
                sc[r, list(matched)] = True
                r += 1
            spans.append((start, r))
        return cls(tip_ids, review_ids, sc, tuple(spans))

    @property
    def n_tips(self) -> int:
        return len(self.tip_ids)

    @property
    def n_reviews(self) -> int:
        return len(self.review_ids)

    def tip_index(self, tip) -> int:
        return tip if isinstance(tip, (int, np.integer)) else self.tip_ids.index(getattr(tip, "id", tip))

    def n_sentences(self, tip) -> int:
        a, b = self.tip_rows[self.tip_index(tip)]
        return b - a

    def relevant_sentences(self, tip) -> int:
        a, b = self.tip_rows[self.tip_index(tip)]
        return int(self.sentence_covers[a:b].any(axis=1).sum())


# -- pair table -----------------------------------------------------------

@dataclass(frozen=True)
class PairTable:
    """All tip-sentence x review-sentence similarities for a corpus, computed once."""

    corpus: Corpus
    index: Index
    scores: PairScores
    tip_rows: tuple[tuple[int, int], ...]
    review_cols: tuple[tuple[int, int], ...]
    review_sentence_stems: tuple[tuple[str, ...], ...]

    def merged(self, config: SelectionConfig, prefs: UserPreferences | None = None) -> np.ndarray:
        boost = None
        if prefs:
            boost = np.array([preference_boost(prefs, st) for st in self.review_sentence_stems])
        return self.scores.merged(config.weights, boost)

    def sentence_matches(self, merged: np.ndarray, threshold: float) -> np.ndarray:
        return merged >= threshold - MATCH_EPS

    def collapse_reviews(self, sentence_level: np.ndarray) -> np.ndarray:
        """(rows, review sentences) -> (rows, reviews) with ``any`` over each review's sentences."""
        out = np.zeros((sentence_level.shape[0], len(self.review_cols)), dtype=bool)
        for j, (a, b) in enumerate(self.review_cols):
            if b > a:
                out[:, j] = sentence_level[:, a:b].any(axis=1)
        return out


def build_pair_table(corpus: Corpus, index: Index, jobs: int = 1) -> PairTable:
    tip_sents, tip_rows = [], []
    for t in corpus.micro_reviews:
        tip_rows.append((len(tip_sents), len(tip_sents) + len(t.sentences)))
        tip_sents.extend(t.sentences)
    rev_sents, review_cols = [], []
    for r in corpus.reviews:
        review_cols.append((len(rev_sents), len(rev_sents) + len(r.sentences)))
        rev_sents.extend(r.sentences)
    scores = pairwise_scores(index, tip_sents, rev_sents, jobs=jobs)
    stems = tuple(tuple(corpus.stems(s)) for s in rev_sents)
    return PairTable(corpus, index, scores, tuple(tip_rows), tuple(review_cols), stems)


def build_coverage_matrix(
    corpus: Corpus,
    index: Index,
    config: SelectionConfig,
    prefs: UserPreferences | None = None,
    table: PairTable | None = None,
    jobs: int = 1,
) -> CoverageMatrix:
    """Coverage at ``config.match_threshold``; tip selection passes no preferences."""
    table = table or build_pair_table(corpus, index, jobs)
    matches = table.sentence_matches(table.merged(config, prefs), config.match_threshold)
    return CoverageMatrix(
        tuple(t.id for t in corpus.micro_reviews),
        tuple(r.id for r in corpus.reviews),
        table.collapse_reviews(matches),
        table.tip_rows,
    )


# -- set functions --------------------------------------------------------

def cov(tip, M: CoverageMatrix) -> float:
    if M.n_reviews == 0:
        return 0.0
    return M.tip_masks[M.tip_index(tip)].bit_count() / M.n_reviews


def covered_mask(S: Iterable, M: CoverageMatrix) -> int:
    mask = 0
    for tip in S:
        mask |= M.tip_masks[M.tip_index(tip)]
    return mask


def cov_set(S: Iterable, M: CoverageMatrix) -> float:
    if M.n_reviews == 0:
        return 0.0
    return covered_mask(S, M).bit_count() / M.n_reviews


def eff(tip, M: CoverageMatrix) -> float:
    n = M.n_sentences(tip)
    if n == 0:
        raise ValueError(f"tip {tip!r} has no sentences; efficiency is undefined")
    return M.relevant_sentences(tip) / n


def eff_avg(S: Iterable, M: CoverageMatrix) -> float:
    S = list(S)
    if not S:
        raise ValueError("average efficiency of an empty set is undefined")
    return sum(eff(t, M) for t in S) / len(S)


# -- greedy ---------------------------------------------------------------

@dataclass(frozen=True)
class SelectionStep:
    chosen_id: str
    gain: float
    cost: float
    cov_after: float
    eff_avg_after: float

    def to_dict(self) -> dict:
        return {
            "chosen_id": self.chosen_id,
            "gain": self.gain,
            "cost": self.cost,
            "cov_after": self.cov_after,
            "eff_avg_after": self.eff_avg_after,
        }


@dataclass(frozen=True)
class TipSelection:
    ids: tuple[str, ...]
    steps: tuple[SelectionStep, ...]
    stop_reason: str = "budget"

    def __len__(self) -> int:
        return len(self.ids)

    def to_dict(self) -> dict:
        return {
            "selected": list(self.ids),
            "stop_reason": self.stop_reason,
            "steps": [s.to_dict() for s in self.steps],
        }

    @classmethod
    def from_dict(cls, data: dict) -> TipSelection:
        steps = tuple(SelectionStep(**s) for s in data.get("steps", []))
        return cls(tuple(data["selected"]), steps, data.get("stop_reason", "budget"))


def tip_cost(efficiency: float, beta: float) -> float:
    return beta * (1.0 - efficiency) + (1.0 - beta)


def select_micro_reviews(M: CoverageMatrix, T: int, alpha: float, beta: float) -> TipSelection:
    """Greedy gain/cost selection of at most ``T`` tips keeping average efficiency >= alpha.

    A zero-cost candidate (only possible with beta = 1 and a fully efficient
    tip) outranks every finite ratio. Ties go to the larger gain, then the
    smaller tip id.
    """
    if T < 1:
        raise ValueError("tip budget T must be at least 1")
    if not (0.0 <= alpha <= 1.0 and 0.0 <= beta <= 1.0):
        raise ValueError("alpha and beta must lie in [0, 1]")

    effs = [eff(i, M) if M.n_sentences(i) else 0.0 for i in range(M.n_tips)]
    chosen: list[int] = []
    steps: list[SelectionStep] = []
    covered = 0
    eff_sum = 0.0
    pool = set(range(M.n_tips))
    reason = "budget"
    while len(chosen) < T:
        eligible = [
            i for i in pool
            if M.n_sentences(i) and (eff_sum + effs[i]) / (len(chosen) + 1) >= alpha - EFF_EPS
        ]
        if not eligible:
            reason = "no_eligible_candidate"
            break
        gains = {i: (M.tip_masks[i] | covered).bit_count() - covered.bit_count() for i in eligible}
        if max(gains.values()) == 0:
            reason = "zero_gain"
            break

        def key(i):
            cost = tip_cost(effs[i], beta)
            g = gains[i]
            if cost <= 0:
                ratio = math.inf if g > 0 else 0.0
            else:
                ratio = g / cost
            return (-ratio, -g, M.tip_ids[i])

        best = min(eligible, key=key)
        chosen.append(best)
        pool.discard(best)
        covered |= M.tip_masks[best]
        eff_sum += effs[best]
        n = max(M.n_reviews, 1)
        steps.append(SelectionStep(
            chosen_id=M.tip_ids[best],
            gain=gains[best] / n,
            cost=tip_cost(effs[best], beta),
            cov_after=covered.bit_count() / n,
            eff_avg_after=eff_sum / len(chosen),
        ))
        if not pool and len(chosen) < T:
            reason = "exhausted"
            break
    return TipSelection(tuple(M.tip_ids[i] for i in chosen), tuple(steps), reason)
