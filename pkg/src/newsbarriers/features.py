"""Tokenization, vocabulary and TF-IDF vectors, optionally with concept tokens.

Concepts are injected as synthetic tokens ``CONCEPT::<name>`` into the same
token stream as the text, so one vectorizer handles both feature modes.
"""

from __future__ import annotations

import hashlib
import logging
import math
import unicodedata
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence
from urllib.parse import unquote, urlsplit

import numpy as np
import scipy.sparse as sp

log = logging.getLogger(__name__)

CONCEPT_PREFIX = "CONCEPT::"


class VocabularyError(ValueError):
    """No token survived document-frequency filtering."""


@dataclass(frozen=True)
class FeatureConfig:
    min_df: int = 2
    max_df_ratio: float = 0.95
    use_concepts: bool = False
    concept_weight: int = 1
    lowercase: bool = True
    include_title: bool = True

    def __post_init__(self):
        if self.min_df < 1:
            raise ValueError("min_df must be >= 1")
        if not 0 < self.max_df_ratio <= 1:
            raise ValueError("max_df_ratio must be in (0, 1]")
        if self.concept_weight < 1:
            raise ValueError("concept_weight must be a positive integer")


@dataclass(frozen=True)
class Vocabulary:
    index: dict[str, int]
    df: dict[str, int]
    n_docs: int

    def __len__(self):
        return len(self.index)

    @property
    def tokens(self) -> list[str]:
        return sorted(self.index, key=self.index.__getitem__)

    def idf(self, token: str) -> float:
        return math.log((1 + self.n_docs) / (1 + self.df[token])) + 1.0

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for tok in self.tokens:
            h.update(tok.encode("utf-8"))
            h.update(b"\x00")
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class SparseVector:
    """Sorted ``(index, weight)`` pairs of a ``dim``-dimensional vector."""

    indices: tuple[int, ...]
    weights: tuple[float, ...]
    dim: int

    def __post_init__(self):
        if len(self.indices) != len(self.weights):
            raise ValueError("indices and weights differ in length")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")
        if self.indices and not 0 <= self.indices[0] <= self.indices[-1] < self.dim:
            raise ValueError("index out of range")
        if any(w == 0.0 for w in self.weights):
            raise ValueError("zero weights must not be stored")

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.weights))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[list(self.indices)] = self.weights
        return out


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in "PS"


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    """Whitespace split, then trim leading/trailing punctuation and symbols.

    Inner punctuation survives ("u.s.-china"), tokens without any letter or
    digit are dropped.  Text tokens that would start with the concept prefix
    are escaped with a leading underscore.
    """
    out = []
    for chunk in text.split():
        lo, hi = 0, len(chunk)
        while lo < hi and _is_punct(chunk[lo]):
            lo += 1
        while hi > lo and _is_punct(chunk[hi - 1]):
            hi -= 1
        tok = chunk[lo:hi]
        if not any(ch.isalnum() for ch in tok):
            continue
        if lowercase:
            tok = tok.lower()
        if tok.startswith(CONCEPT_PREFIX):
            tok = "_" + tok
        out.append(tok)
    return out


def concept_name(uri: str) -> str | None:
    try:
        parts = urlsplit(uri)
    except ValueError:
        return None
    if not parts.scheme or not parts.netloc:
        return None
    segment = parts.path.rstrip("/").rsplit("/", 1)[-1]
    name = unquote(segment).strip().lower()
    return name or None


def concept_tokens(concepts: Iterable[str], concept_weight: int = 1) -> list[str]:
    out = []
    for uri in concepts:
        name = concept_name(uri)
        if name is None:
            log.warning("skipping malformed concept URI %r", uri)
            continue
        out.extend([CONCEPT_PREFIX + name] * concept_weight)
    return out


def article_tokens(article, config: FeatureConfig) -> list[str]:
    text = f"{article.title} {article.body}" if config.include_title else article.body
    tokens = tokenize(text, config.lowercase)
    if config.use_concepts:
        tokens += concept_tokens(article.concepts, config.concept_weight)
    return tokens


def build_vocabulary(docs: Sequence[Sequence[str]], config: FeatureConfig = FeatureConfig()) -> Vocabulary:
    n = len(docs)
    if n == 0:
        raise VocabularyError("cannot build a vocabulary from zero documents")
    df = Counter()
    for doc in docs:
        df.update(set(doc))
    kept = sorted(t for t, c in df.items() if c >= config.min_df and c / n <= config.max_df_ratio)
    if not kept:
        raise VocabularyError(
            f"vocabulary is empty after filtering {len(df)} distinct tokens "
            f"(min_df={config.min_df}, max_df_ratio={config.max_df_ratio}, documents={n})"
        )
    return Vocabulary({t: i for i, t in enumerate(kept)}, {t: df[t] for t in kept}, n)


def count_vectorize(tokens: Iterable[str], vocab: Vocabulary) -> SparseVector:
    counts = Counter(vocab.index[t] for t in tokens if t in vocab.index)
    idx = sorted(counts)
    return SparseVector(tuple(idx), tuple(float(counts[i]) for i in idx), len(vocab))


def tfidf_vectorize(tokens: Iterable[str], vocab: Vocabulary) -> SparseVector:
    counts = Counter(t for t in tokens if t in vocab.index)
    pairs = sorted((vocab.index[t], c * vocab.idf(t)) for t, c in counts.items())
    norm = math.sqrt(sum(w * w for _, w in pairs))
    if norm == 0:
        return SparseVector((), (), len(vocab))
    return SparseVector(tuple(i for i, _ in pairs), tuple(w / norm for _, w in pairs), len(vocab))


def to_csr(vectors: Sequence[SparseVector], dim: int | None = None) -> sp.csr_matrix:
    if dim is None:
        dim = vectors[0].dim if vectors else 0
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([v.nnz for v in vectors])
    indices = np.fromiter((i for v in vectors for i in v.indices), dtype=np.int64, count=int(indptr[-1]))
    data = np.fromiter((w for v in vectors for w in v.weights), dtype=float, count=int(indptr[-1]))
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), dim))


@dataclass(frozen=True)
class Featurized:
    vocab: Vocabulary
    train: list[SparseVector]
    test: list[SparseVector]
    train_counts: list[SparseVector]
    test_counts: list[SparseVector]


def featurize_dataset(train_articles, test_articles, config: FeatureConfig = FeatureConfig()) -> Featurized:
    """Fit the vocabulary on ``train_articles`` and vectorize both sides.

    Raw count vectors over the same vocabulary are kept alongside TF-IDF for
    the multinomial naive Bayes model.
    """
    train_tok = [article_tokens(a, config) for a in train_articles]
    test_tok = [article_tokens(a, config) for a in test_articles]
    vocab = build_vocabulary(train_tok, config)
    return Featurized(
        vocab=vocab,
        train=[tfidf_vectorize(t, vocab) for t in train_tok],
        test=[tfidf_vectorize(t, vocab) for t in test_tok],
        train_counts=[count_vectorize(t, vocab) for t in train_tok],
        test_counts=[count_vectorize(t, vocab) for t in test_tok],
    )


def dump_vocabulary(path: str | Path, vocab: Vocabulary) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for tok in vocab.tokens:
            fh.write(f"{tok}\t{vocab.index[tok]}\t{vocab.df[tok]}\n")


def dump_matrix(path: str | Path, vectors: Sequence[SparseVector], dim: int | None = None) -> None:
    if dim is None:
        dim = vectors[0].dim if vectors else 0
    nnz = sum(v.nnz for v in vectors)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(vectors)} {dim} {nnz}\n")
        for row, v in enumerate(vectors):
            for col, w in zip(v.indices, v.weights):
                fh.write(f"{row} {col} {w:.17g}\n")
