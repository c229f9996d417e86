"""Personalized review selection guided by short tips."""

from .config import SelectionConfig, load_config
from .corpus import Corpus, UserPreferences, build_corpus, load_corpus, load_fixture
from .coverage import build_coverage_matrix, select_micro_reviews
from .evaluation import evaluate
from .indexing import build_index
from .selection import prsa

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "SelectionConfig",
    "UserPreferences",
    "build_corpus",
    "build_coverage_matrix",
    "build_index",
    "evaluate",
    "load_config",
    "load_corpus",
    "load_fixture",
    "prsa",
    "select_micro_reviews",
]
