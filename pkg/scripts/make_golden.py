"""Regenerate the CLI golden files under tests/data/golden from the bundled fixture.

    python3 scripts/make_golden.py

The tests check each golden file against an independent scalar recount, so
a regenerated file that drifts from the oracle fails loudly.
"""

import shutil
import tempfile
from pathlib import Path

from reviewselect.cli import main
from reviewselect.corpus import fixture_paths

GOLDEN = Path(__file__).resolve().parents[1] / "tests" / "data" / "golden"
SWEEP = "0.5,0.6,0.7,0.8,0.9,1.0"


def run(*argv) -> None:
    code = main([str(a) for a in argv])
    if code != 0:
        raise SystemExit(f"command failed ({code}): {argv}")


def regenerate() -> None:
    GOLDEN.mkdir(parents=True, exist_ok=True)
    reviews, tips = fixture_paths()
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        run("ingest", "--reviews", reviews, "--tips", tips, "--out", tmp / "corpus.json")
        run("select-tips", "--corpus", tmp / "corpus.json", "--out", tmp / "tips.json")
        run("select-reviews", "--corpus", tmp / "corpus.json", "--tip-selection", tmp / "tips.json",
            "--out", GOLDEN / "select_reviews_default.json")
        run("evaluate", "--corpus", tmp / "corpus.json", "--tip-selection", tmp / "tips.json",
            "--sweep", SWEEP, "--out", GOLDEN / "evaluate_sweep.json", "--table", GOLDEN / "evaluate_sweep.txt")
        shutil.copy(tmp / "tips.json", GOLDEN / "select_tips_default.json")
    for p in sorted(GOLDEN.iterdir()):
        print(p.relative_to(GOLDEN.parents[2]))


if __name__ == "__main__":
    regenerate()
