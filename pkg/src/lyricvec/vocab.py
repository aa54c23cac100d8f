"""Vocabulary construction, subsampling probabilities, and the negative
sampling table."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus


@dataclass
class Vocabulary:
    """Token inventory sorted by descending count (ties broken by token).

    counts[i] is the corpus frequency of index_to_token[i]; total_tokens is
    the sum over retained tokens only.
    """

    index_to_token: list[str]
    counts: np.ndarray
    min_count: int
    token_to_index: dict[str, int] = field(init=False)

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        self.token_to_index = {t: i for i, t in enumerate(self.index_to_token)}

    def __len__(self) -> int:
        return len(self.index_to_token)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_index

    @property
    def total_tokens(self) -> int:
        return int(self.counts.sum())

    def encode(self, tokens: list[str]) -> np.ndarray:
        """Map tokens to indices, silently dropping out-of-vocabulary ones."""
        t2i = self.token_to_index
        return np.array([t2i[t] for t in tokens if t in t2i], dtype=np.int32)


def build_vocab(corpus: Corpus, min_count: int = 5) -> Vocabulary:
    """Count tokens across the corpus and retain those seen at least
    min_count times."""
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    raw: dict[str, int] = {}
    for doc in corpus:
        for token in doc.tokens:
            raw[token] = raw.get(token, 0) + 1
    kept = [(t, c) for t, c in raw.items() if c >= min_count]
    if not kept:
        raise ValueError(
            f"no token appears at least min_count={min_count} times; vocabulary is empty"
        )
    kept.sort(key=lambda item: (-item[1], item[0]))
    tokens = [t for t, _ in kept]
    counts = np.array([c for _, c in kept], dtype=np.int64)
    return Vocabulary(index_to_token=tokens, counts=counts, min_count=min_count)


def subsample_keep_prob(freq: float, t: float) -> float:
    """Keep probability for a token with relative frequency freq under
    threshold t: min(1, sqrt(t/f) + t/f). Zero threshold keeps nothing."""
    if not 0.0 < freq <= 1.0:
        raise ValueError(f"freq must be in (0, 1], got {freq}")
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0.0:
        return 0.0
    ratio = t / freq
    return min(1.0, np.sqrt(ratio) + ratio)


def keep_probs(vocab: Vocabulary, t: float) -> np.ndarray:
    """Per-index keep probabilities for frequent-word subsampling."""
    freqs = vocab.counts / vocab.total_tokens
    if t == 0.0:
        return np.zeros(len(vocab), dtype=np.float64)
    ratio = t / freqs
    return np.minimum(1.0, np.sqrt(ratio) + ratio)


@dataclass
class NegativeTable:
    """Unigram distribution raised to the 3/4 power, stored as a cumulative
    probability table for inverse-CDF sampling."""

    probs: np.ndarray
    cumulative: np.ndarray = field(init=False)

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=np.float64)
        self.cumulative = np.cumsum(self.probs)
        # guard against accumulated rounding pushing the last entry below 1
        self.cumulative[-1] = 1.0

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Sample word indices; u < cumulative[i] picks the first such i."""
        u = rng.random(size)
        return np.searchsorted(self.cumulative, u, side="right").astype(np.int32)


def build_negative_table(vocab: Vocabulary, power: float = 0.75) -> NegativeTable:
    weights = vocab.counts.astype(np.float64) ** power
    return NegativeTable(probs=weights / weights.sum())
