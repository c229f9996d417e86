"""Personalized review selection over a chosen tip subset.

For every review we count the selected tips that at least one of its
sentences matches, with the user's preferences scaling the merged score.
Reviews reaching ``match_count_threshold`` are kept and ranked.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import SelectionConfig
from .corpus import Corpus, Review, UserPreferences
from .coverage import CoverageMatrix, PairTable, TipSelection, build_pair_table
from .indexing import Index
from .similarity import MATCH_EPS, rank_candidates, score_pair


class SelectionError(ValueError):
    pass


@dataclass(frozen=True)
class ReviewScore:
    """Per-review outcome against the selected tips."""

    id: str
    match_count: int
    coverage: float
    efficiency: float
    # mean over selected tips of the best merged score, the review's X
    score: float
    syntactic: float
    semantic: float
    sentiment: float
    per_tip: tuple[tuple[str, float], ...]

    def rank_key(self) -> tuple:
        return (self.id, self.score, self.syntactic, self.semantic, self.sentiment)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "match_count": self.match_count,
            "coverage": self.coverage,
            "efficiency": self.efficiency,
            "score": self.score,
            "merged_scores_per_tip": dict(self.per_tip),
        }


@dataclass(frozen=True)
class ReviewSelection:
    selected: tuple[ReviewScore, ...]
    # every review, in corpus order, whether selected or not
    all_scores: tuple[ReviewScore, ...]
    tip_ids: tuple[str, ...]
    threshold: float
    match_count_threshold: int

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.selected)

    @property
    def rejected_count(self) -> int:
        return len(self.all_scores) - len(self.selected)

    def to_dict(self) -> dict:
        return {
            "tips": list(self.tip_ids),
            "selected": [r.to_dict() for r in self.selected],
            "rejected_count": self.rejected_count,
        }


def _tip_positions(corpus: Corpus, tips: TipSelection | Sequence[str]) -> list[int]:
    ids = tips.ids if isinstance(tips, TipSelection) else tuple(tips)
    pos = {t.id: i for i, t in enumerate(corpus.micro_reviews)}
    missing = [t for t in ids if t not in pos]
    if missing:
        raise SelectionError(f"selected tips not in corpus: {missing}")
    return [pos[t] for t in ids]


def prsa(
    corpus: Corpus,
    tips: TipSelection | Sequence[str],
    prefs: UserPreferences | None,
    index: Index,
    config: SelectionConfig,
    table: PairTable | None = None,
    jobs: int = 1,
) -> ReviewSelection:
    """Keep reviews matching at least ``config.match_count_threshold`` selected tips."""
    tip_pos = _tip_positions(corpus, tips)
    if not tip_pos:
        raise SelectionError("tip subset required before review selection")
    table = table or build_pair_table(corpus, index, jobs)
    merged = table.merged(config, prefs)
    thr = config.match_threshold
    n_tips = len(tip_pos)

    scores = []
    for j, r in enumerate(corpus.reviews):
        ca, cb = table.review_cols[j]
        count = 0
        per_tip = []
        sims = np.zeros(3)
        sent_hit = np.zeros(cb - ca, dtype=bool)
        for i in tip_pos:
            ra, rb = table.tip_rows[i]
            block = merged[ra:rb, ca:cb]
            if block.size == 0:
                per_tip.append((corpus.micro_reviews[i].id, 0.0))
                continue
            best = float(block.max())
            a, b = np.unravel_index(int(block.argmax()), block.shape)
            sims += (
                table.scores.syntactic[ra + a, ca + b],
                table.scores.semantic[ra + a, ca + b],
                table.scores.sentiment[ra + a, ca + b],
            )
            hits = block >= thr - MATCH_EPS
            if hits.any():
                count += 1
                sent_hit |= hits.any(axis=0)
            per_tip.append((corpus.micro_reviews[i].id, best))
        sims /= n_tips
        scores.append(ReviewScore(
            id=r.id,
            match_count=count,
            coverage=count / n_tips,
            efficiency=float(sent_hit.mean()) if sent_hit.size else 0.0,
            score=sum(v for _, v in per_tip) / n_tips,
            syntactic=float(sims[0]),
            semantic=float(sims[1]),
            sentiment=float(sims[2]),
            per_tip=tuple(per_tip),
        ))

    by_id = {s.id: s for s in scores}
    ranked = rank_candidates(s.rank_key() for s in scores if s.match_count >= config.match_count_threshold)
    return ReviewSelection(
        selected=tuple(by_id[c[0]] for c in ranked),
        all_scores=tuple(scores),
        tip_ids=tuple(corpus.micro_reviews[i].id for i in tip_pos),
        threshold=thr,
        match_count_threshold=config.match_count_threshold,
    )


def review_coverage(r: Review | str, tips: TipSelection | Sequence[str], M: CoverageMatrix) -> float:
    """Fraction of the selected tips that cover review ``r``."""
    ids = tips.ids if isinstance(tips, TipSelection) else tuple(tips)
    if not ids:
        return 0.0
    j = M.review_ids.index(getattr(r, "id", r))
    return sum(bool(M.covers[M.tip_index(t), j]) for t in ids) / len(ids)


def review_efficiency(
    r: Review,
    tips: TipSelection | Sequence[str],
    index: Index,
    config: SelectionConfig,
    prefs: UserPreferences | None = None,
) -> float:
    """Fraction of ``r``'s sentences matching at least one selected tip sentence."""
    if not r.sentences:
        raise SelectionError(f"review {r.id!r} has no sentences; efficiency is undefined")
    corpus = index.corpus
    tip_docs = [corpus.tip(t) for t in (tips.ids if isinstance(tips, TipSelection) else tips)]
    relevant = 0
    for s in r.sentences:
        if any(
            score_pair(s, ts, index, config.match_threshold, prefs, config.weights).matched
            for t in tip_docs for ts in t.sentences
        ):
            relevant += 1
    return relevant / len(r.sentences)
