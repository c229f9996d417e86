"""Match-threshold sweep on the bundled fixture and on synthetic corpora.

    python3 scripts/run_sweep.py [--seeds 10] [--reviews 40] [--tips 12]

Prints selected-review counts per threshold; counts must never increase.
"""

import argparse

from reviewselect.config import SelectionConfig
from reviewselect.corpus import generate_fixture, load_fixture
from reviewselect.evaluation import threshold_sweep
from reviewselect.indexing import build_index

THRESHOLDS = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0]


def sweep(corpus) -> list[int]:
    rows = threshold_sweep(corpus, build_index(corpus), SelectionConfig(), THRESHOLDS)
    return [r.selected_count for r in rows]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--reviews", type=int, default=40)
    ap.add_argument("--tips", type=int, default=12)
    ap.add_argument("--vocab", type=int, default=100)
    args = ap.parse_args()

    print("corpus".ljust(12) + "".join(f"{t:>6g}" for t in THRESHOLDS))
    runs = [("fixture", sweep(load_fixture()))]
    for seed in range(args.seeds):
        runs.append((f"seed={seed}", sweep(generate_fixture(seed, args.reviews, args.tips, args.vocab))))
    bad = 0
    for name, counts in runs:
        mono = all(b <= a for a, b in zip(counts, counts[1:]))
        bad += not mono
        print(name.ljust(12) + "".join(f"{c:>6d}" for c in counts) + ("" if mono else "  NOT MONOTONE"))
    print(f"{len(runs)} sweeps, {bad} non-monotone")


if __name__ == "__main__":
    main()
