"""Multi-version experiment pipelines: aggregation, seeding, stage audit."""

import dataclasses

import numpy as np
import pytest

from lyricvec.corpus import Corpus, Document
from lyricvec.embed import Hyperparams, train_doc2vec
from lyricvec.pipelines import (
    CLASSIFIER_NAMES,
    _infer_test_vectors,
    run_genre_pipeline,
    run_popularity_pipeline,
)
from lyricvec.synthetic import gen_synthetic


def fast_hyper(**kw):
    base = dict(dim=12, window=3, negatives=2, epochs=5, mode="pvdbow",
                min_count=1, subsample_t=0.0, seed=11)
    base.update(kw)
    return Hyperparams(**base)


def genre_corpus(classes=3, docs=30):
    return gen_synthetic(
        classes=classes, docs_per_class=docs, vocab_per_class=40,
        overlap_fraction=0.2, seed=5, min_doc_tokens=20, max_doc_tokens=40,
        marker_rate=0.3,
    )


class TestGenrePipeline:
    def test_structure_and_aggregates(self):
        result = run_genre_pipeline(
            genre_corpus(), versions=3, hyper=fast_hyper(), per_class=20,
            train_fraction=0.8, knn_k=5, infer_steps=5, linear_epochs=10,
        )
        assert len(result.versions) == 3
        for v, vr in enumerate(result.versions):
            assert vr.version == v
            assert vr.seed == 11 + v
            assert set(vr.reports) == set(CLASSIFIER_NAMES)
            for name in CLASSIFIER_NAMES:
                report = vr.reports[name]
                assert report.confusion.classes == ["genre0", "genre1", "genre2"]
                # every test document lands in exactly one confusion cell
                assert report.confusion.total == len(vr.split.test)
                assert len(vr.predictions[name]) == len(vr.split.test)
        for name, agg in result.aggregate.items():
            averages = [v.reports[name].average_f1 for v in result.versions]
            assert agg.versions == 3
            assert agg.mean_average_f1 == pytest.approx(np.mean(averages))
            assert agg.std_average_f1 == pytest.approx(np.std(averages))
            assert agg.min_average_f1 == min(averages)
            assert agg.max_average_f1 == max(averages)
            assert agg.min_average_f1 <= agg.mean_average_f1 <= agg.max_average_f1

    def test_separable_classes_score_high(self):
        result = run_genre_pipeline(
            genre_corpus(), versions=2, hyper=fast_hyper(epochs=8), per_class=24,
            knn_k=5, infer_steps=10, linear_epochs=15,
        )
        assert result.aggregate["label_vector"].mean_average_f1 > 0.9

    def test_deterministic(self):
        kwargs = dict(versions=2, hyper=fast_hyper(), per_class=20, knn_k=5,
                      infer_steps=4, linear_epochs=5)
        a = run_genre_pipeline(genre_corpus(), **kwargs)
        b = run_genre_pipeline(genre_corpus(), **kwargs)
        assert a.to_dict() == b.to_dict()

    def test_versions_use_distinct_seeds_and_splits(self):
        result = run_genre_pipeline(
            genre_corpus(), versions=2, hyper=fast_hyper(), per_class=20,
            knn_k=3, infer_steps=3, linear_epochs=3,
        )
        assert result.versions[0].split.train != result.versions[1].split.train

    def test_stage_order(self):
        stages = []
        run_genre_pipeline(
            genre_corpus(), versions=2, hyper=fast_hyper(epochs=2), per_class=15,
            knn_k=3, infer_steps=2, linear_epochs=2,
            stage_hook=lambda stage, version: stages.append((stage, version)),
        )
        expected = ["undersample", "split", "train", "infer", "classify", "evaluate"]
        assert stages == [(s, v) for v in range(2) for s in expected]

    def test_log_callback(self):
        lines = []
        run_genre_pipeline(
            genre_corpus(), versions=1, hyper=fast_hyper(epochs=2), per_class=15,
            knn_k=3, infer_steps=2, linear_epochs=2, log=lines.append,
        )
        assert len(lines) == 1 and lines[0].startswith("version 0:")

    def test_no_undersampling_when_per_class_none(self):
        corpus = genre_corpus(classes=2, docs=12)
        result = run_genre_pipeline(
            corpus, versions=1, hyper=fast_hyper(epochs=2), per_class=None,
            knn_k=3, infer_steps=2, linear_epochs=2,
        )
        ds = result.versions[0].split
        assert len(ds.train) + len(ds.test) == len(corpus)

    def test_requires_two_classes(self):
        corpus = gen_synthetic(classes=1, docs_per_class=10, vocab_per_class=20,
                               min_doc_tokens=10, max_doc_tokens=15)
        with pytest.raises(ValueError, match="2 labeled classes"):
            run_genre_pipeline(corpus, versions=1, hyper=fast_hyper())

    def test_rejects_zero_versions(self):
        with pytest.raises(ValueError, match="versions"):
            run_genre_pipeline(genre_corpus(), versions=0, hyper=fast_hyper())


class TestLabelIsolation:
    def test_test_document_labels_unread_between_split_and_evaluate(self):
        """Audit every label access by stage: after the split, a test
        document's label may be read again only at evaluation."""
        audit = {"stage": "setup", "reads": []}

        class SpyDoc(Document):
            def __init__(self, doc_id, tokens, label):
                self.id = doc_id
                self.text = " ".join(tokens)
                self.tokens = list(tokens)
                self._label = label
                self.rating = None

            @property
            def label(self):
                audit["reads"].append((audit["stage"], self.id))
                return self._label

        rng = np.random.default_rng(1)
        pools = [[f"a{i}" for i in range(8)], [f"b{i}" for i in range(8)]]
        docs = []
        for j in range(24):
            pool = pools[j % 2]
            tokens = [pool[i] for i in rng.integers(0, 8, 25)]
            docs.append(SpyDoc(f"d{j}", tokens, "alpha" if j % 2 == 0 else "beta"))

        result = run_genre_pipeline(
            Corpus(documents=docs), versions=1, hyper=fast_hyper(epochs=2),
            per_class=10, knn_k=3, infer_steps=3, linear_epochs=3,
            stage_hook=lambda stage, version: audit.__setitem__("stage", stage),
        )
        test_ids = set(result.versions[0].split.test)
        assert test_ids
        leaks = [
            (stage, doc_id)
            for stage, doc_id in audit["reads"]
            if stage in ("train", "infer", "classify") and doc_id in test_ids
        ]
        assert leaks == []
        # the audit itself must have seen reads where they are expected
        eval_reads = {i for s, i in audit["reads"] if s == "evaluate"}
        assert test_ids <= eval_reads
        train_stage_reads = {i for s, i in audit["reads"] if s == "train"}
        assert train_stage_reads  # training validates its own documents


class TestPopularityPipeline:
    def _rated_corpus(self, **kw):
        base = dict(classes=2, docs_per_class=24, vocab_per_class=30,
                    overlap_fraction=0.2, seed=3, min_doc_tokens=20,
                    max_doc_tokens=30, marker_vocab=6, marker_rate=0.5)
        base.update(kw)
        return gen_synthetic(**base)

    def test_runs_per_genre_with_binary_classes(self):
        result = run_popularity_pipeline(
            self._rated_corpus(), versions=2, hyper=fast_hyper(epochs=3),
            knn_k=3, infer_steps=3, linear_epochs=5,
        )
        assert sorted(result.per_genre) == ["genre0", "genre1"]
        assert result.skipped == {}
        for genre, pipeline in result.per_genre.items():
            assert len(pipeline.versions) == 2
            for vr in pipeline.versions:
                report = vr.reports["label_vector"]
                assert report.confusion.classes == ["high", "low"]

    def test_one_sided_genre_skipped_with_warning(self):
        corpus = self._rated_corpus()
        docs = [
            dataclasses.replace(d, rating=5) if d.label == "genre1" else d
            for d in corpus
        ]
        with pytest.warns(UserWarning, match="genre1"):
            result = run_popularity_pipeline(
                Corpus(documents=docs), versions=1, hyper=fast_hyper(epochs=2),
                knn_k=3, infer_steps=2, linear_epochs=3,
            )
        assert list(result.per_genre) == ["genre0"]
        assert "genre1" in result.skipped
        assert "low=0" in result.skipped["genre1"]

    def test_all_genres_skipped_is_an_error(self):
        corpus = self._rated_corpus(docs_per_class=6, high_fraction=1.0)
        with pytest.warns(UserWarning):
            with pytest.raises(ValueError, match="no genre"):
                run_popularity_pipeline(corpus, versions=1, hyper=fast_hyper(epochs=2))

    def test_unlabeled_corpus_rejected(self):
        corpus = Corpus(documents=[Document(id="x", text="a b", tokens=["a", "b"])])
        with pytest.raises(ValueError, match="genre-labeled"):
            run_popularity_pipeline(corpus, versions=1, hyper=fast_hyper())


class TestInferenceFallback:
    def test_all_oov_test_document_gets_seeded_init(self):
        corpus = genre_corpus(classes=2, docs=10)
        model = train_doc2vec(corpus, fast_hyper(epochs=2))
        stranger = Document(id="o", text="zzz qqq", tokens=["zzz", "qqq"])
        vectors = _infer_test_vectors(model, [stranger], infer_steps=4, version_seed=7)
        rng = np.random.default_rng(7 * 1_000_003)
        expected = (rng.random(model.dim, dtype=np.float32) - 0.5) / model.dim
        np.testing.assert_array_equal(vectors[0], expected)
