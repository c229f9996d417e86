"""Command-line entry point.

    reviewselect ingest --reviews R.jsonl --tips T.jsonl --out corpus.json
    reviewselect select-tips --corpus corpus.json --out tips.json
    reviewselect select-reviews --corpus corpus.json --tip-selection tips.json --out reviews.json
    reviewselect evaluate --corpus corpus.json --tip-selection tips.json --sweep 0.5,0.6 --out eval.json

Exit codes: 0 success, 2 usage or validation error, 3 infeasible constraint.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import ConfigError, SelectionConfig, load_config
from .corpus import (
    Corpus,
    CorpusError,
    UserPreferences,
    corpus_from_dict,
    corpus_to_dict,
    dump_corpus,
    fixture_paths,
    generate_fixture,
    load_corpus,
    load_preferences,
)
from .coverage import TipSelection, build_coverage_matrix, build_pair_table, select_micro_reviews
from .evaluation import InfeasibleError, evaluate
from .indexing import build_index, build_profile, load_categories, load_lexicon, profile_to_preferences
from .selection import SelectionError, prsa
from .textprep import STOPLIST_VERSION, PreprocessPipeline

log = logging.getLogger("reviewselect")

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE = 0, 2, 3


class UsageError(Exception):
    pass


def _write_json(path: str | None, payload: dict) -> None:
    text = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _effective_config(args) -> SelectionConfig:
    overrides = {
        "alpha": getattr(args, "alpha", None),
        "beta": getattr(args, "beta", None),
        "tip_budget": getattr(args, "budget", None),
        "match_count_threshold": getattr(args, "t", None),
        "match_threshold": getattr(args, "match_threshold", None),
        "review_budget": getattr(args, "review_budget", None),
        "w_syn": args.w_syn,
        "w_sem": args.w_sem,
        "w_sent": args.w_sent,
        "smoothing": args.smoothing,
        "seed": args.seed,
    }
    return load_config(args.config, overrides)


def _pipeline(args) -> PreprocessPipeline:
    return PreprocessPipeline.from_stoplist(args.stoplist)


def _load_corpus(args, pipeline: PreprocessPipeline) -> Corpus:
    if args.corpus:
        try:
            data = json.loads(Path(args.corpus).read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CorpusError(f"cannot read corpus cache {args.corpus}: {exc}") from None
        return corpus_from_dict(data, pipeline)
    if args.reviews and args.tips:
        return load_corpus(args.reviews, args.tips, pipeline, args.venue)
    raise UsageError("give --corpus, or both --reviews and --tips")


def _header(command: str, cfg: SelectionConfig, corpus: Corpus, args) -> dict:
    return {
        "command": command,
        "config": cfg.to_dict(),
        "stoplist": STOPLIST_VERSION if args.stoplist is None else Path(args.stoplist).name,
        "venue_id": corpus.venue_id,
        "n_reviews": corpus.n_reviews,
        "n_tips": corpus.n_micro_reviews,
    }


def _read_tip_selection(path: str | None) -> TipSelection:
    if not path:
        raise UsageError("a prior tip selection is required (--tip-selection, from select-tips)")
    try:
        data = json.loads(Path(path).read_text("utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read tip selection {path}: {exc}") from None
    sel = TipSelection.from_dict(data.get("selection", data))
    if len(sel) == 0:
        raise UsageError(f"tip selection in {path} is empty")
    return sel


def _preferences(args, corpus: Corpus, index, pipeline: PreprocessPipeline) -> UserPreferences | None:
    if args.prefs:
        return load_preferences(args.prefs, pipeline)
    if args.profile_user:
        reviews = [r for r in corpus.reviews if r.user_id == args.profile_user]
        if not reviews:
            raise UsageError(f"user {args.profile_user!r} has no reviews in the corpus")
        profile = build_profile(reviews, load_categories(args.categories, pipeline), index, args.keywords)
        log.info("profile %s: category=%s keywords=%s", profile.user_id, profile.category, profile.keywords)
        return profile_to_preferences(profile)
    return None


def _prefs_echo(prefs: UserPreferences | None) -> list:
    return [{"term": t, "weight": w} for t, w in prefs.terms] if prefs else []


# -- commands -------------------------------------------------------------

def cmd_ingest(args) -> int:
    pipeline = _pipeline(args)
    if not (args.reviews and args.tips):
        raise UsageError("ingest needs --reviews and --tips")
    corpus = load_corpus(args.reviews, args.tips, pipeline, args.venue)
    if args.out:
        _write_json(args.out, corpus_to_dict(corpus))
    print(f"ingested venue {corpus.venue_id!r}: {corpus.n_reviews} reviews, "
          f"{corpus.n_micro_reviews} tips, {len(corpus.vocabulary)} terms")
    return EXIT_OK


def _prepare(args):
    cfg = _effective_config(args)
    pipeline = _pipeline(args)
    corpus = _load_corpus(args, pipeline)
    if corpus.n_reviews + corpus.n_micro_reviews == 0:
        raise CorpusError("corpus is empty")
    index = build_index(corpus, load_lexicon(args.lexicon), cfg.smoothing)
    table = build_pair_table(corpus, index, jobs=args.jobs)
    return cfg, pipeline, corpus, index, table


def cmd_select_tips(args) -> int:
    cfg, _, corpus, index, table = _prepare(args)
    M = build_coverage_matrix(corpus, index, cfg, table=table)
    sel = select_micro_reviews(M, cfg.tip_budget, cfg.alpha, cfg.beta)
    if len(sel) == 0:
        print(f"warning: no tip satisfies the efficiency constraint (alpha={cfg.alpha}); selection is empty",
              file=sys.stderr)
    _write_json(args.out, {**_header("select-tips", cfg, corpus, args), "selection": sel.to_dict()})
    return EXIT_OK


def cmd_select_reviews(args) -> int:
    tips = _read_tip_selection(args.tip_selection)
    cfg, pipeline, corpus, index, table = _prepare(args)
    prefs = _preferences(args, corpus, index, pipeline)
    sel = prsa(corpus, tips, prefs, index, cfg, table=table)
    _write_json(args.out, {
        **_header("select-reviews", cfg, corpus, args),
        "preferences": _prefs_echo(prefs),
        **sel.to_dict(),
    })
    return EXIT_OK


def _parse_sweep(text: str | None) -> list[float]:
    if not text:
        return []
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--sweep must be comma-separated numbers, got {text!r}") from None
    if values != sorted(values):
        raise UsageError("--sweep thresholds must be in ascending order")
    if any(not 0.0 <= v <= 1.0 for v in values):
        raise UsageError("--sweep thresholds must lie in [0, 1]")
    return values


def cmd_evaluate(args) -> int:
    thresholds = _parse_sweep(args.sweep)
    tips = _read_tip_selection(args.tip_selection)
    cfg, pipeline, corpus, index, table = _prepare(args)
    prefs = _preferences(args, corpus, index, pipeline)
    report = evaluate(corpus, index, cfg, tips, prefs, thresholds, table=table, candidates=args.candidates)
    _write_json(args.out, {
        **_header("evaluate", cfg, corpus, args),
        "candidate_mode": args.candidates,
        "sweep_thresholds": thresholds,
        "preferences": _prefs_echo(prefs),
        **report.to_dict(),
    })
    if args.table:
        Path(args.table).write_text(report.render_table(), encoding="utf-8")
    return EXIT_OK


def cmd_fixture(args) -> int:
    if args.seed is None:
        src_reviews, src_tips = fixture_paths()
        Path(args.reviews_out).write_text(src_reviews.read_text("utf-8"), encoding="utf-8")
        Path(args.tips_out).write_text(src_tips.read_text("utf-8"), encoding="utf-8")
    else:
        corpus = generate_fixture(args.seed, args.n_reviews, args.n_tips, args.vocab_size)
        dump_corpus(corpus, args.reviews_out, args.tips_out)
    return EXIT_OK


# -- parser ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--corpus", help="corpus cache written by 'ingest'")
    common.add_argument("--reviews", help="reviews JSON Lines file")
    common.add_argument("--tips", help="tips JSON Lines file")
    common.add_argument("--venue", help="restrict to one venue_id")
    common.add_argument("--stoplist", help="stoplist file, one word per line")
    common.add_argument("--lexicon", help="directory holding positive.txt and negative.txt")
    common.add_argument("--categories", help="JSON object of category name -> seed terms")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for pair scoring")
    common.add_argument("--w-syn", type=float)
    common.add_argument("--w-sem", type=float)
    common.add_argument("--w-sent", type=float)
    common.add_argument("--smoothing", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    def personal(p):
        p.add_argument("--prefs", help="user preferences JSON file")
        p.add_argument("--profile-user", help="derive preferences from this user's reviews")
        p.add_argument("--keywords", type=int, default=5, help="profile keyword count")
        p.add_argument("--t", type=int, help="minimum number of matched tips per review")
        p.add_argument("--tip-selection", help="output of select-tips")

    parser = argparse.ArgumentParser(prog="reviewselect", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="validate and cache a corpus")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("select-tips", parents=[common], help="greedy tip subset selection")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--budget", type=int)
    p.add_argument("--match-threshold", type=float)
    p.set_defaults(func=cmd_select_tips)

    p = sub.add_parser("select-reviews", parents=[common], help="personalized review selection")
    personal(p)
    p.add_argument("--match-threshold", type=float)
    p.set_defaults(func=cmd_select_reviews)

    p = sub.add_parser("evaluate", parents=[common], help="MaxPerCoverage evaluation and sweep")
    personal(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--match-threshold", type=float)
    p.add_argument("--review-budget", type=int)
    p.add_argument("--sweep", help="ascending comma-separated thresholds")
    p.add_argument("--table", help="also write the plain-text table here")
    p.add_argument("--candidates", choices=("threshold", "prefix"), default="threshold",
                   help="candidate sets: one per threshold, or ranked prefixes")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("fixture", help="write the bundled or a synthetic corpus")
    p.add_argument("--reviews-out", required=True)
    p.add_argument("--tips-out", required=True)
    p.add_argument("--seed", type=int, help="synthetic corpus seed (omit for the bundled fixture)")
    p.add_argument("--n-reviews", type=int, default=12)
    p.add_argument("--n-tips", type=int, default=8)
    p.add_argument("--vocab-size", type=int, default=100)
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_fixture)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (CorpusError, ConfigError, SelectionError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
