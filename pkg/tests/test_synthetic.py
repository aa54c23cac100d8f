"""Synthetic corpus generator: shape, seeding, and overlap control."""

import numpy as np
import pytest

from lyricvec.synthetic import gen_synthetic, type_overlap


def small(**kw):
    base = dict(classes=3, docs_per_class=40, vocab_per_class=60,
                overlap_fraction=0.5, seed=1, min_doc_tokens=20,
                max_doc_tokens=40, marker_vocab=5, marker_rate=0.2)
    base.update(kw)
    return gen_synthetic(**base)


class TestShape:
    def test_counts_ids_and_labels(self):
        corpus = small()
        assert len(corpus) == 120
        labels = {d.label for d in corpus}
        assert labels == {"genre0", "genre1", "genre2"}
        assert corpus["c2d39"].label == "genre2"
        per_class = sum(1 for d in corpus if d.label == "genre0")
        assert per_class == 40

    def test_doc_lengths_within_bounds(self):
        corpus = small()
        lengths = [len(d.tokens) for d in corpus]
        assert min(lengths) >= 20 and max(lengths) <= 40

    def test_text_joins_tokens(self):
        corpus = small()
        doc = corpus.documents[0]
        assert doc.text.split() == doc.tokens

    def test_ratings_split_high_low(self):
        corpus = small(docs_per_class=10, high_fraction=0.5)
        for ci in range(3):
            highs = [corpus[f"c{ci}d{j}"].rating for j in range(5)]
            lows = [corpus[f"c{ci}d{j}"].rating for j in range(5, 10)]
            assert all(r >= 4 for r in highs)
            assert all(r <= 3 for r in lows)

    def test_all_high_fraction(self):
        corpus = small(high_fraction=1.0)
        assert all(d.rating >= 4 for d in corpus)

    def test_markers_only_in_high_documents(self):
        corpus = small(marker_rate=0.5)
        for d in corpus:
            has_marker = any(t.startswith("mark") for t in d.tokens)
            if d.rating <= 3:
                assert not has_marker

    def test_marker_rate_zero_produces_no_markers(self):
        corpus = small(marker_rate=0.0)
        assert not any(t.startswith("mark") for d in corpus for t in d.tokens)


class TestSeeding:
    def test_same_seed_identical(self):
        a, b = small(seed=9), small(seed=9)
        assert [(d.id, d.tokens, d.rating) for d in a] == [
            (d.id, d.tokens, d.rating) for d in b
        ]

    def test_different_seed_differs(self):
        a, b = small(seed=1), small(seed=2)
        assert [d.tokens for d in a] != [d.tokens for d in b]


class TestOverlapControl:
    @pytest.mark.parametrize("overlap", [0.0, 0.5, 0.9])
    def test_observed_overlap_tracks_requested(self, overlap):
        # marker_rate=0 so only class vocabularies contribute types; a
        # large corpus makes every type appear with high probability
        corpus = gen_synthetic(
            classes=3, docs_per_class=250, vocab_per_class=100,
            overlap_fraction=overlap, seed=4, min_doc_tokens=40,
            max_doc_tokens=80, marker_rate=0.0,
        )
        measured = type_overlap(corpus, "genre0", "genre1")
        assert measured == pytest.approx(overlap, abs=0.02)

    def test_zero_overlap_shares_no_types(self):
        corpus = small(overlap_fraction=0.0, marker_rate=0.0)
        types = [set() for _ in range(3)]
        for d in corpus:
            types[int(d.label[-1])].update(d.tokens)
        assert types[0] & types[1] == set()
        assert types[0] & types[2] == set()

    def test_class_frequencies_differ_even_for_shared_types(self):
        """The per-class Zipf shuffle must give shared words different
        ranks in different classes."""
        corpus = gen_synthetic(
            classes=2, docs_per_class=300, vocab_per_class=50,
            overlap_fraction=0.8, seed=0, min_doc_tokens=50,
            max_doc_tokens=100, marker_rate=0.0,
        )
        freq = [dict(), dict()]
        for d in corpus:
            ci = int(d.label[-1])
            for t in d.tokens:
                freq[ci][t] = freq[ci].get(t, 0) + 1
        shared = [t for t in freq[0] if t.startswith("shared") and t in freq[1]]
        ratios = [freq[0][t] / freq[1][t] for t in shared]
        assert max(ratios) > 2.0 and min(ratios) < 0.5

    def test_type_overlap_requires_tokens(self):
        corpus = small()
        with pytest.raises(ValueError, match="ghost"):
            type_overlap(corpus, "genre0", "ghost")


class TestValidation:
    @pytest.mark.parametrize(
        "kw",
        [
            {"classes": 0},
            {"docs_per_class": 0},
            {"vocab_per_class": 0},
            {"overlap_fraction": 1.0},
            {"overlap_fraction": -0.1},
            {"min_doc_tokens": 0},
            {"min_doc_tokens": 50, "max_doc_tokens": 10},
            {"marker_vocab": 0},
            {"marker_rate": 1.5},
            {"high_fraction": -0.2},
        ],
    )
    def test_rejects_bad_arguments(self, kw):
        with pytest.raises(ValueError):
            small(**kw)
