"""Seeded synthetic corpora with controllable class separation.

Each class owns a vocabulary that shares a configurable fraction of
types with a global pool, and draws document tokens Zipfian over a
class-specific shuffle of that vocabulary (so even shared types have
class-dependent frequencies). Half of each class (configurable) is
"high" rated and has tokens replaced at a fixed rate by a marker
sub-vocabulary, giving popularity prediction a learnable signal.
"""

from __future__ import annotations

import numpy as np

from .corpus import Corpus, Document


def gen_synthetic(
    classes: int = 8,
    docs_per_class: int = 1250,
    vocab_per_class: int = 400,
    overlap_fraction: float = 0.5,
    seed: int = 0,
    min_doc_tokens: int = 50,
    max_doc_tokens: int = 300,
    marker_vocab: int = 20,
    marker_rate: float = 0.2,
    high_fraction: float = 0.5,
) -> Corpus:
    """Generate a labeled, rated corpus.

    Class vocabularies hold vocab_per_class types of which
    round(overlap_fraction * vocab_per_class) come from a pool common to
    all classes, so any two classes overlap in exactly that fraction of
    their types (markers aside). Ratings are 4-5 for the first
    round(high_fraction * docs_per_class) documents of each class and 1-3
    for the rest; high documents have each token replaced with
    probability marker_rate by a uniform draw from the marker vocabulary.
    """
    if classes < 1:
        raise ValueError(f"classes must be >= 1, got {classes}")
    if docs_per_class < 1:
        raise ValueError(f"docs_per_class must be >= 1, got {docs_per_class}")
    if vocab_per_class < 1:
        raise ValueError(f"vocab_per_class must be >= 1, got {vocab_per_class}")
    if not 0.0 <= overlap_fraction < 1.0:
        raise ValueError(f"overlap_fraction must be in [0, 1), got {overlap_fraction}")
    if not 1 <= min_doc_tokens <= max_doc_tokens:
        raise ValueError(
            f"need 1 <= min_doc_tokens <= max_doc_tokens, "
            f"got {min_doc_tokens}, {max_doc_tokens}"
        )
    if marker_vocab < 1:
        raise ValueError(f"marker_vocab must be >= 1, got {marker_vocab}")
    if not 0.0 <= marker_rate <= 1.0:
        raise ValueError(f"marker_rate must be in [0, 1], got {marker_rate}")
    if not 0.0 <= high_fraction <= 1.0:
        raise ValueError(f"high_fraction must be in [0, 1], got {high_fraction}")

    n_shared = int(round(overlap_fraction * vocab_per_class))
    shared = [f"shared{k}" for k in range(n_shared)]
    markers = [f"mark{k}" for k in range(marker_vocab)]
    n_high = int(round(high_fraction * docs_per_class))
    rng = np.random.default_rng(seed)
    docs = []
    for ci in range(classes):
        vocab = shared + [f"c{ci}w{k}" for k in range(vocab_per_class - n_shared)]
        vocab = [vocab[i] for i in rng.permutation(len(vocab))]
        weights = 1.0 / (np.arange(len(vocab), dtype=np.float64) + 1.0)
        cum = np.cumsum(weights / weights.sum())
        cum[-1] = 1.0
        for j in range(docs_per_class):
            length = int(rng.integers(min_doc_tokens, max_doc_tokens + 1))
            draws = np.searchsorted(cum, rng.random(length), side="right")
            tokens = [vocab[i] for i in draws]
            high = j < n_high
            if high:
                mask = rng.random(length) < marker_rate
                marks = rng.integers(0, marker_vocab, size=length)
                tokens = [
                    markers[marks[i]] if mask[i] else tokens[i] for i in range(length)
                ]
                rating = int(rng.integers(4, 6))
            else:
                rating = int(rng.integers(1, 4))
            docs.append(
                Document(
                    id=f"c{ci}d{j}",
                    text=" ".join(tokens),
                    tokens=tokens,
                    label=f"genre{ci}",
                    rating=rating,
                )
            )
    return Corpus(documents=docs, provenance=f"synthetic(seed={seed})")


def type_overlap(corpus: Corpus, label_a: str, label_b: str) -> float:
    """Observed type overlap between two classes: |A intersect B| divided
    by the smaller type inventory."""
    types_a: set[str] = set()
    types_b: set[str] = set()
    for doc in corpus:
        if doc.label == label_a:
            types_a.update(doc.tokens)
        elif doc.label == label_b:
            types_b.update(doc.tokens)
    if not types_a or not types_b:
        raise ValueError(f"no tokens found for {label_a!r} or {label_b!r}")
    return len(types_a & types_b) / min(len(types_a), len(types_b))
