"""End-to-end experiment pipelines.

run_genre_pipeline repeats undersample, split, train, infer, classify,
evaluate over several seeded dataset versions and aggregates the
reports. run_popularity_pipeline does the same per genre on rating-
derived binary labels. Test documents enter training only as unlabeled
token sequences at inference time; their labels are read again at the
evaluation stage (the optional stage_hook lets tests audit exactly
that).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .classify import (
    Prediction,
    knn_classify,
    label_vector_classify,
    linear_classify,
    train_linear,
)
from .corpus import Corpus, DatasetVersion, binarize_popularity, split, undersample
from .embed import EmbeddingModel, Hyperparams, infer_doc_vector, train_doc2vec
from .evaluate import EvalReport, confusion, f1_scores

CLASSIFIER_NAMES = ("label_vector", "knn", "softmax")


@dataclass
class VersionResult:
    """Per-version artifacts: the split and one report per classifier."""

    version: int
    seed: int
    split: DatasetVersion
    reports: dict[str, EvalReport]
    predictions: dict[str, list[Prediction]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "seed": self.seed,
            "split": self.split.to_dict(),
            "reports": {k: r.to_dict() for k, r in self.reports.items()},
        }


@dataclass
class AggregateReport:
    classifier: str
    versions: int
    mean_average_f1: float
    std_average_f1: float
    min_average_f1: float
    max_average_f1: float
    mean_per_class_f1: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "classifier": self.classifier,
            "versions": self.versions,
            "mean_average_f1": self.mean_average_f1,
            "std_average_f1": self.std_average_f1,
            "min_average_f1": self.min_average_f1,
            "max_average_f1": self.max_average_f1,
            "mean_per_class_f1": dict(self.mean_per_class_f1),
        }


@dataclass
class PipelineResult:
    versions: list[VersionResult]
    aggregate: dict[str, AggregateReport]

    def to_dict(self) -> dict:
        return {
            "versions": [v.to_dict() for v in self.versions],
            "aggregate": {k: a.to_dict() for k, a in self.aggregate.items()},
        }


def _aggregate(versions: list[VersionResult]) -> dict[str, AggregateReport]:
    out: dict[str, AggregateReport] = {}
    if not versions:
        return out
    for name in versions[0].reports:
        averages = np.array([v.reports[name].average_f1 for v in versions])
        class_names = versions[0].reports[name].per_class_f1.keys()
        mean_per_class = {
            c: float(np.mean([v.reports[name].per_class_f1[c] for v in versions]))
            for c in class_names
        }
        out[name] = AggregateReport(
            classifier=name,
            versions=len(versions),
            mean_average_f1=float(averages.mean()),
            std_average_f1=float(averages.std()),
            min_average_f1=float(averages.min()),
            max_average_f1=float(averages.max()),
            mean_per_class_f1=mean_per_class,
        )
    return out


def _infer_test_vectors(
    model: EmbeddingModel, test_docs, infer_steps: int, version_seed: int
) -> np.ndarray:
    """One inferred vector per test document, each with its own derived
    seed. Documents whose tokens are all out of vocabulary fall back to
    the seeded random initialization (they cannot be fitted, only
    guessed)."""
    vectors = np.empty((len(test_docs), model.dim), dtype=np.float32)
    for i, doc in enumerate(test_docs):
        doc_seed = version_seed * 1_000_003 + i
        try:
            vectors[i] = infer_doc_vector(model, doc.tokens, steps=infer_steps, seed=doc_seed)
        except ValueError:
            rng = np.random.default_rng(doc_seed)
            vectors[i] = (rng.random(model.dim, dtype=np.float32) - 0.5) / model.dim
    return vectors


def _classify_all(
    name: str,
    model: EmbeddingModel,
    test_docs,
    test_vectors: np.ndarray,
    knn_k: int,
    linear_epochs: int,
    linear_lr: float,
    linear_l2: float,
    version_seed: int,
) -> list[Prediction]:
    if name == "label_vector":
        return [
            label_vector_classify(model, vec, doc_id=doc.id)
            for doc, vec in zip(test_docs, test_vectors)
        ]
    if name == "knn":
        k = min(knn_k, model.doc_vectors.shape[0])
        return [
            knn_classify(model.doc_vectors, model.doc_labels, vec, k, doc_id=doc.id)
            for doc, vec in zip(test_docs, test_vectors)
        ]
    if name == "softmax":
        linear = train_linear(
            model.doc_vectors,
            model.doc_labels,
            epochs=linear_epochs,
            lr=linear_lr,
            l2=linear_l2,
            seed=version_seed,
        )
        return [
            linear_classify(linear, vec, doc_id=doc.id)
            for doc, vec in zip(test_docs, test_vectors)
        ]
    raise ValueError(f"unknown classifier {name!r} (expected one of {CLASSIFIER_NAMES})")


def _run_version(
    corpus: Corpus,
    version: int,
    version_seed: int,
    hyper: Hyperparams,
    per_class: int | None,
    train_fraction: float,
    classifiers: tuple[str, ...],
    knn_k: int,
    infer_steps: int,
    linear_epochs: int,
    linear_lr: float,
    linear_l2: float,
    stage_hook: Callable[[str, int], None] | None,
    binarize: bool,
) -> VersionResult:
    def mark(stage: str) -> None:
        if stage_hook is not None:
            stage_hook(stage, version)

    mark("undersample")
    if binarize:
        sampled = binarize_popularity(corpus, seed=version_seed)
    elif per_class is not None:
        sampled = undersample(corpus, per_class, seed=version_seed)
    else:
        sampled = corpus
    mark("split")
    ds = split(sampled, train_fraction, seed=version_seed)
    train_docs = [sampled[i] for i in ds.train]
    test_docs = [sampled[i] for i in ds.test]
    mark("train")
    model = train_doc2vec(
        Corpus(documents=train_docs, provenance=corpus.provenance),
        hyper.with_overrides(seed=version_seed),
    )
    mark("infer")
    test_vectors = _infer_test_vectors(model, test_docs, infer_steps, version_seed)
    mark("classify")
    predictions = {
        name: _classify_all(
            name, model, test_docs, test_vectors,
            knn_k, linear_epochs, linear_lr, linear_l2, version_seed,
        )
        for name in classifiers
    }
    mark("evaluate")
    truths = [doc.label for doc in test_docs]
    reports = {}
    for name, preds in predictions.items():
        cm = confusion(truths, [p.predicted_label for p in preds], model.label_names)
        reports[name] = f1_scores(
            cm, metadata={"classifier": name, "version": version, "seed": version_seed}
        )
    return VersionResult(
        version=version, seed=version_seed, split=ds,
        reports=reports, predictions=predictions,
    )


def run_genre_pipeline(
    corpus: Corpus,
    versions: int = 10,
    hyper: Hyperparams | None = None,
    per_class: int | None = 1000,
    train_fraction: float = 0.8,
    classifiers: tuple[str, ...] = CLASSIFIER_NAMES,
    knn_k: int = 25,
    infer_steps: int = 50,
    linear_epochs: int = 30,
    linear_lr: float = 0.5,
    linear_l2: float = 1e-4,
    stage_hook: Callable[[str, int], None] | None = None,
    log: Callable[[str], None] | None = None,
) -> PipelineResult:
    """Repeat the genre experiment over `versions` seeded dataset versions.

    Version v uses seed hyper.seed + v for undersampling, splitting, and
    training. per_class=None skips undersampling. Returns per-version
    reports plus mean/std aggregates per classifier.
    """
    if versions < 1:
        raise ValueError(f"versions must be >= 1, got {versions}")
    if len(corpus.label_set) < 2:
        raise ValueError("genre pipeline needs at least 2 labeled classes")
    hyper = hyper or Hyperparams()
    results = []
    for v in range(versions):
        result = _run_version(
            corpus, v, hyper.seed + v, hyper, per_class, train_fraction,
            tuple(classifiers), knn_k, infer_steps,
            linear_epochs, linear_lr, linear_l2, stage_hook, binarize=False,
        )
        results.append(result)
        if log is not None:
            summary = "  ".join(
                f"{name}={r.average_f1:.3f}" for name, r in sorted(result.reports.items())
            )
            log(f"version {v}: {summary}")
    return PipelineResult(versions=results, aggregate=_aggregate(results))


@dataclass
class PopularityResult:
    per_genre: dict[str, PipelineResult]
    skipped: dict[str, str]

    def to_dict(self) -> dict:
        return {
            "per_genre": {g: r.to_dict() for g, r in self.per_genre.items()},
            "skipped": dict(self.skipped),
        }


def run_popularity_pipeline(
    corpus: Corpus,
    versions: int = 10,
    hyper: Hyperparams | None = None,
    train_fraction: float = 0.8,
    classifiers: tuple[str, ...] = CLASSIFIER_NAMES,
    knn_k: int = 25,
    infer_steps: int = 50,
    linear_epochs: int = 30,
    linear_lr: float = 0.5,
    linear_l2: float = 1e-4,
    stage_hook: Callable[[str, int], None] | None = None,
    log: Callable[[str], None] | None = None,
) -> PopularityResult:
    """Binary low/high popularity prediction, one model per genre.

    A genre is skipped with a warning when its rated documents cannot
    form both classes with at least 2 usable documents each.
    """
    if versions < 1:
        raise ValueError(f"versions must be >= 1, got {versions}")
    hyper = hyper or Hyperparams()
    genres = sorted(corpus.label_set)
    if not genres:
        raise ValueError("popularity pipeline needs genre-labeled documents")
    per_genre: dict[str, PipelineResult] = {}
    skipped: dict[str, str] = {}
    for genre in genres:
        genre_docs = [d for d in corpus if d.label == genre]
        rated = Corpus(documents=genre_docs, provenance=corpus.provenance)
        counts = {"low": 0, "high": 0}
        for doc in rated:
            if doc.rating is not None and doc.tokens:
                counts["low" if doc.rating <= 3 else "high"] += 1
        if min(counts.values()) < 2:
            reason = (
                f"skipping genre {genre!r}: needs at least 2 rated documents per "
                f"popularity class, found low={counts['low']} high={counts['high']}"
            )
            warnings.warn(reason, stacklevel=2)
            skipped[genre] = reason
            continue
        results = []
        for v in range(versions):
            results.append(
                _run_version(
                    rated, v, hyper.seed + v, hyper, None, train_fraction,
                    tuple(classifiers), knn_k, infer_steps,
                    linear_epochs, linear_lr, linear_l2, stage_hook, binarize=True,
                )
            )
        per_genre[genre] = PipelineResult(versions=results, aggregate=_aggregate(results))
        if log is not None:
            summary = "  ".join(
                f"{name}={agg.mean_average_f1:.3f}"
                for name, agg in sorted(per_genre[genre].aggregate.items())
            )
            log(f"genre {genre}: {summary}")
    if not per_genre:
        raise ValueError("no genre had enough rated documents in both popularity classes")
    return PopularityResult(per_genre=per_genre, skipped=skipped)
