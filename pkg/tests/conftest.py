import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from reviewselect.config import SelectionConfig
from reviewselect.corpus import load_fixture
from reviewselect.coverage import CoverageMatrix, build_coverage_matrix, build_pair_table, select_micro_reviews
from reviewselect.indexing import build_index, load_lexicon
from reviewselect.textprep import PreprocessPipeline

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def pipeline():
    return PreprocessPipeline()


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon()


@pytest.fixture(scope="session")
def fixture_corpus(pipeline):
    return load_fixture(pipeline)


@pytest.fixture(scope="session")
def fixture_index(fixture_corpus, lexicon):
    return build_index(fixture_corpus, lexicon)


@pytest.fixture(scope="session")
def fixture_table(fixture_corpus, fixture_index):
    return build_pair_table(fixture_corpus, fixture_index)


@pytest.fixture(scope="session")
def default_config():
    return SelectionConfig()


@pytest.fixture(scope="session")
def fixture_tips(fixture_corpus, fixture_index, fixture_table, default_config):
    M = build_coverage_matrix(fixture_corpus, fixture_index, default_config, table=fixture_table)
    return select_micro_reviews(M, default_config.tip_budget, default_config.alpha, default_config.beta)


def random_matrix(rng: np.random.Generator, n_tips: int, n_reviews: int, density: float = 0.3,
                  max_sentences: int = 1) -> CoverageMatrix:
    """Random sentence-level coverage; each tip gets 1..max_sentences sentences."""
    rows = []
    for _ in range(n_tips):
        sents = []
        for _ in range(int(rng.integers(1, max_sentences + 1))):
            sents.append(set(np.flatnonzero(rng.random(n_reviews) < density).tolist()))
        rows.append(sents)
    return CoverageMatrix.from_rows(rows, n_reviews)


def explicit_sets(M: CoverageMatrix) -> dict[str, set]:
    return {t: {M.review_ids[j] for j in np.flatnonzero(M.covers[i])} for i, t in enumerate(M.tip_ids)}


# acceptance criteria report one line each; printed again in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
