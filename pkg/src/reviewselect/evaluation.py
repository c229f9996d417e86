"""MaxPerCoverage scoring of candidate review sets, an exhaustive coverage oracle,
and threshold sweeps.

Review scores ``X_i`` are fractional in [0, 1]; binary decision variables
only appear inside :func:`brute_force_max_coverage`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

from .config import SelectionConfig
from .corpus import Corpus, UserPreferences
from .coverage import (
    CoverageMatrix,
    PairTable,
    TipSelection,
    build_coverage_matrix,
    build_pair_table,
    covered_mask,
    select_micro_reviews,
)
from .indexing import Index
from .selection import ReviewSelection, prsa

APPROX_RATIO = 1.0 - 1.0 / math.e
MAX_ORACLE_TIPS = 20


class InfeasibleError(ValueError):
    """No candidate set satisfies the minimum-score constraint."""


@dataclass(frozen=True)
class ScoredSet:
    set_id: str
    review_ids: tuple[str, ...]
    scores: tuple[float, ...]
    coverage_flags: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.scores) != len(self.review_ids):
            raise ValueError("one score per review id")
        if any(not 0.0 <= x <= 1.0 for x in self.scores):
            raise ValueError("scores must lie in [0, 1]")
        if not self.coverage_flags:
            object.__setattr__(self, "coverage_flags", tuple(1 for _ in self.review_ids))
        if any(c not in (0, 1) for c in self.coverage_flags):
            raise ValueError("coverage flags must be 0 or 1")

    @property
    def size(self) -> int:
        return len(self.review_ids)


def _require_nonempty(S: ScoredSet) -> None:
    if not S.scores:
        raise ValueError(f"scored set {S.set_id!r} is empty")


def per_eff_min(S: ScoredSet) -> float:
    _require_nonempty(S)
    return min(S.scores)


def per_gain(S: ScoredSet) -> float:
    _require_nonempty(S)
    return sum(S.scores) / len(S.scores)


def per_cost(S: ScoredSet) -> float:
    return 1.0 - per_eff_min(S)


def average_constraint_ok(S: ScoredSet) -> bool:
    """Whether the set's mean score is at least each of its coverage flags."""
    return per_gain(S) >= max(S.coverage_flags)


@dataclass(frozen=True)
class CandidateRow:
    set_id: str
    size: int
    per_gain: float
    per_cost: float
    per_eff_min: float
    feasible: bool
    average_constraint_ok: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _ratio(gain: float, cost: float) -> float:
    return math.inf if cost <= 0 else gain / cost


def best_row(rows: Sequence[CandidateRow]) -> CandidateRow:
    """Highest gain/cost among feasible rows.

    Zero cost outranks every finite ratio; ties go to larger gain, then the
    smaller set, then the smaller set id.
    """
    feasible = [r for r in rows if r.feasible]
    if not feasible:
        raise InfeasibleError("no feasible candidate set")
    return min(feasible, key=lambda r: (-_ratio(r.per_gain, r.per_cost), -r.per_gain, r.size, r.set_id))


def max_per_coverage_select(candidate_sets: Sequence[ScoredSet], alpha: float) -> tuple[ScoredSet, list[CandidateRow]]:
    """Best gain/cost set among those with minimum score >= alpha (see :func:`best_row`)."""
    if not candidate_sets:
        raise ValueError("no candidate sets")
    rows = []
    for S in candidate_sets:
        g, c, m = per_gain(S), per_cost(S), per_eff_min(S)
        rows.append(CandidateRow(S.set_id, S.size, g, c, m, m >= alpha, average_constraint_ok(S)))
    if not any(r.feasible for r in rows):
        raise InfeasibleError(f"no candidate set has minimum score >= alpha={alpha}")
    chosen_id = best_row(rows).set_id
    return next(S for S in candidate_sets if S.set_id == chosen_id), rows


def brute_force_max_coverage(M: CoverageMatrix, K: int) -> tuple[tuple[str, ...], int]:
    """Exhaustive best tip subset of size <= K: (ids, number of reviews covered).

    Among optimal subsets the lexicographically smallest sorted id tuple wins.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    if M.n_tips > MAX_ORACLE_TIPS:
        raise ValueError(f"oracle is desk-scale only ({M.n_tips} tips > {MAX_ORACLE_TIPS})")
    best_ids: tuple[str, ...] = ()
    best_n = 0
    masks = M.tip_masks
    for k in range(1, min(K, M.n_tips) + 1):
        for combo in combinations(range(M.n_tips), k):
            mask = 0
            for i in combo:
                mask |= masks[i]
            n = mask.bit_count()
            ids = tuple(sorted(M.tip_ids[i] for i in combo))
            # the empty set is optimal when nothing covers anything
            if n > best_n or (n == best_n and n > 0 and ids < best_ids):
                best_n, best_ids = n, ids
    return best_ids, best_n


def approximation_check(greedy_cov: float, opt_cov: float) -> bool:
    if opt_cov <= 0:
        raise ValueError("optimal coverage must be positive")
    # small slack absorbs rounding when coverages are passed as fractions
    return greedy_cov >= APPROX_RATIO * opt_cov - 1e-12


# -- sweeps and reports ---------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    threshold: float
    selected_count: int
    accuracy: float

    def to_dict(self) -> dict:
        return {"threshold": self.threshold, "selected_count": self.selected_count, "accuracy": self.accuracy}


def threshold_sweep(
    corpus: Corpus,
    index: Index,
    config: SelectionConfig,
    thresholds: Sequence[float],
    prefs: UserPreferences | None = None,
    tips: TipSelection | None = None,
    table: PairTable | None = None,
) -> list[SweepRow]:
    """Selected-review counts across match thresholds.

    Tips are chosen once, at ``config.match_threshold``, unless given; only
    the review-matching threshold varies, which makes the counts monotone.
    """
    thresholds = list(thresholds)
    if thresholds != sorted(thresholds):
        raise ValueError("thresholds must be sorted ascending")
    if any(not 0.0 <= t <= 1.0 for t in thresholds):
        raise ValueError("thresholds must lie in [0, 1]")
    table = table or build_pair_table(corpus, index)
    if tips is None:
        M = build_coverage_matrix(corpus, index, config, table=table)
        tips = select_micro_reviews(M, config.tip_budget, config.alpha, config.beta)
    n = corpus.n_reviews
    rows = []
    for thr in thresholds:
        if len(tips) == 0:
            count = 0
        else:
            count = len(prsa(corpus, tips, prefs, index, config.replace(match_threshold=thr), table=table).selected)
        rows.append(SweepRow(thr, count, count / n if n else 0.0))
    return rows


def prefix_candidates(selection: ReviewSelection, max_size: int) -> list[ScoredSet]:
    """Ranked prefixes of one selection, sizes 1..max_size.

    Because the ranking is by score, the size-1 prefix always has the best
    gain/cost ratio; this mode exists for comparison, not as the default.
    """
    top = selection.selected[:max_size]
    return [
        ScoredSet(
            set_id=f"prefix={k:03d}",
            review_ids=tuple(r.id for r in top[:k]),
            scores=tuple(r.score for r in top[:k]),
            coverage_flags=tuple(int(r.match_count > 0) for r in top[:k]),
        )
        for k in range(1, len(top) + 1)
    ]


def candidate_sets(selections: Mapping[float, ReviewSelection], max_size: int) -> list[ScoredSet]:
    """One candidate per match threshold: that threshold's top ``max_size`` ranked reviews."""
    out = []
    for thr in sorted(selections):
        top = selections[thr].selected[:max_size]
        if not top:
            continue
        out.append(ScoredSet(
            set_id=f"threshold={thr:g}",
            review_ids=tuple(r.id for r in top),
            scores=tuple(r.score for r in top),
            coverage_flags=tuple(int(r.match_count > 0) for r in top),
        ))
    return out


@dataclass
class EvaluationReport:
    config: dict
    candidates: list[CandidateRow]
    chosen_set_id: str
    chosen_ids: tuple[str, ...]
    accuracy: float
    per_gain: float
    per_cost: float
    per_eff_min: float
    threshold: float
    review_rows: list[tuple[str, bool, float]]
    sweep: list[SweepRow] = field(default_factory=list)
    tip_approximation: dict | None = None

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "chosen_set": self.chosen_set_id,
            "chosen_ids": list(self.chosen_ids),
            "per_gain": self.per_gain,
            "per_cost": self.per_cost,
            "per_eff_min": self.per_eff_min,
            "accuracy": self.accuracy,
            "candidates": [c.to_dict() for c in self.candidates],
            "reviews": [{"id": i, "selected": s, "score": x} for i, s, x in self.review_rows],
            "sweep": [r.to_dict() for r in self.sweep],
            "tip_approximation": self.tip_approximation,
        }

    def render_table(self) -> str:
        """Plain-text table: id, selection, threshold, score, then the average row."""
        head = f"{'ID':<12} {'Selection':<14} {'Threshold':>9} {'MaxPerCoverage':>15}"
        lines = [head, "-" * len(head)]
        for rid, sel, x in self.review_rows:
            thr = f"{self.threshold:.0%}" if sel else ""
            lines.append(f"{rid:<12} {'Selected' if sel else 'Not selected':<14} {thr:>9} {x:>15.3f}")
        avg = sum(x for _, _, x in self.review_rows) / len(self.review_rows) if self.review_rows else 0.0
        lines.append("-" * len(head))
        lines.append(f"{'Average MaxperCoverage Score':<37} {avg:>15.4f}")
        if self.sweep:
            lines.append("")
            lines.append(f"{'Threshold':>9} {'Selected':>9} {'Accuracy':>9}")
            for row in self.sweep:
                lines.append(f"{row.threshold:>9.2f} {row.selected_count:>9d} {row.accuracy:>9.2%}")
        return "\n".join(lines) + "\n"


def evaluate(
    corpus: Corpus,
    index: Index,
    config: SelectionConfig,
    tips: TipSelection,
    prefs: UserPreferences | None = None,
    thresholds: Sequence[float] = (),
    table: PairTable | None = None,
    candidates: str = "threshold",
) -> EvaluationReport:
    """Score candidate review sets and pick the best one.

    With ``candidates="threshold"`` the candidates are the selections at
    ``config.match_threshold`` and at every sweep threshold; with
    ``"prefix"`` they are the ranked prefixes of the selection at
    ``config.match_threshold``. Raises :class:`InfeasibleError` when none
    meets ``config.alpha``.
    """
    if candidates not in ("threshold", "prefix"):
        raise ValueError(f"unknown candidate mode {candidates!r}")
    if len(tips) == 0:
        raise InfeasibleError("tip selection is empty; nothing to evaluate")
    table = table or build_pair_table(corpus, index)
    sweep = threshold_sweep(corpus, index, config, thresholds, prefs, tips, table) if thresholds else []
    selections = {
        thr: prsa(corpus, tips, prefs, index, config.replace(match_threshold=thr), table=table)
        for thr in sorted({config.match_threshold, *thresholds})
    }
    if candidates == "prefix":
        chosen_thr = config.match_threshold
        sets = prefix_candidates(selections[chosen_thr], config.review_budget)
    else:
        sets = candidate_sets(selections, config.review_budget)
    if not sets:
        raise InfeasibleError("review selection is empty at every threshold")
    chosen, rows = max_per_coverage_select(sets, config.alpha)
    if candidates == "threshold":
        chosen_thr = next(thr for thr in selections if f"threshold={thr:g}" == chosen.set_id)
    chosen_ids = set(chosen.review_ids)
    review_rows = [(r.id, r.id in chosen_ids, r.score) for r in selections[chosen_thr].all_scores]

    approx = None
    M = build_coverage_matrix(corpus, index, config, table=table)
    if M.n_tips <= MAX_ORACLE_TIPS:
        greedy_n = covered_mask(tips.ids, M).bit_count()
        opt_ids, opt_n = brute_force_max_coverage(M, len(tips))
        approx = {
            "greedy_covered": greedy_n,
            "optimal_covered": opt_n,
            "optimal_ids": list(opt_ids),
            "within_bound": approximation_check(greedy_n, opt_n) if opt_n else True,
        }

    return EvaluationReport(
        config=config.to_dict(),
        candidates=rows,
        chosen_set_id=chosen.set_id,
        chosen_ids=chosen.review_ids,
        accuracy=len(chosen.review_ids) / corpus.n_reviews if corpus.n_reviews else 0.0,
        per_gain=per_gain(chosen),
        per_cost=per_cost(chosen),
        per_eff_min=per_eff_min(chosen),
        threshold=chosen_thr,
        review_rows=review_rows,
        sweep=sweep,
        tip_approximation=approx,
    )
