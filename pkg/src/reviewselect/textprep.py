"""Tokenization, stopword removal and stemming.

The pipeline is stateless: the same text always gives the same sentences.
Slang handling is limited to stoplist membership, and spelling correction
is not attempted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .porter import stem

__all__ = [
    "PreprocessPipeline",
    "Segment",
    "load_stoplist",
    "preprocess",
    "remove_stopwords",
    "split_sentences",
    "stem",
    "tokenize",
]

STOPLIST_VERSION = "en-172-v1"

_TOKEN_RE = re.compile(r"[a-z]+")
# a run of terminal punctuation closes a sentence only before whitespace or end
_BOUNDARY_RE = re.compile(r"[.!?]+(?=\s|$)")


def load_stoplist(path: str | Path | None = None) -> frozenset[str]:
    """Read a one-word-per-line stoplist; ``None`` loads the bundled list."""
    if path is None:
        text = resources.files("reviewselect").joinpath("resources/stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


@dataclass(frozen=True)
class Segment:
    """One preprocessed sentence: stems plus its character span in the raw text."""

    stems: tuple[str, ...]
    span: tuple[int, int]


@dataclass(frozen=True)
class PreprocessPipeline:
    stopwords: frozenset[str] = field(default_factory=load_stoplist)

    @classmethod
    def from_stoplist(cls, path: str | Path | None) -> PreprocessPipeline:
        return cls(load_stoplist(path))

    def stem_term(self, term: str) -> str | None:
        """Normalize a user-supplied term to space-joined stems, ``None`` if empty."""
        stems = [stem(t) for t in remove_stopwords(tokenize(term), self)]
        stems = [s for s in stems if s not in self.stopwords]
        return " ".join(stems) if stems else None


def tokenize(text: str) -> list[str]:
    """Lowercase alphabetic runs; digits, punctuation and hyphens split tokens."""
    return _TOKEN_RE.findall(text.lower())


def remove_stopwords(tokens: list[str], pipeline: PreprocessPipeline) -> list[str]:
    sw = pipeline.stopwords
    return [t for t in tokens if t not in sw]


def split_sentences(text: str) -> list[tuple[int, int]]:
    """Character spans of sentences, split on ``.``/``!``/``?`` before whitespace or end."""
    spans = []
    start = 0
    for m in _BOUNDARY_RE.finditer(text):
        spans.append((start, m.end()))
        start = m.end()
    if start < len(text):
        spans.append((start, len(text)))
    out = []
    for a, b in spans:
        while a < b and text[a].isspace():
            a += 1
        if a < b:
            out.append((a, b))
    return out


def preprocess(text: str, pipeline: PreprocessPipeline) -> list[Segment]:
    """Sentence-split, tokenize, drop stopwords and stem; empty sentences are dropped."""
    segments = []
    for a, b in split_sentences(text):
        toks = remove_stopwords(tokenize(text[a:b]), pipeline)
        stems = tuple(stem(t) for t in toks)
        # stemming can produce a stoplist member ("wills" -> "will")
        stems = tuple(s for s in stems if s not in pipeline.stopwords)
        if stems:
            segments.append(Segment(stems, (a, b)))
    return segments
