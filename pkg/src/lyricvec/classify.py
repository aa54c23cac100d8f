"""Classifiers over document vectors.

Three routes to a label: cosine similarity against the jointly trained
label vectors, majority vote over cosine-nearest training documents, and
a multinomial softmax baseline trained by SGD. All tie-breaking is total
and deterministic; see each function for its rule.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .embed import EmbeddingModel


@dataclass
class Prediction:
    doc_id: str
    predicted_label: str
    scores: dict[str, float]

    def to_dict(self, true_label: str | None = None) -> dict:
        return {
            "doc_id": self.doc_id,
            "true_label": true_label,
            "predicted_label": self.predicted_label,
            "scores": {k: float(v) for k, v in self.scores.items()},
        }


def _argmax_label(scores: dict[str, float]) -> str:
    """Highest-scoring label; exact ties go to the lexicographically
    smaller label (iteration over sorted keys with strict >)."""
    best = None
    for label in sorted(scores):
        if best is None or scores[label] > scores[best]:
            best = label
    return best


def _unit(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    norm = np.linalg.norm(v)
    return v / norm if norm > 0 else v


def label_vector_classify(
    model: EmbeddingModel, doc_vec: np.ndarray, doc_id: str = ""
) -> Prediction:
    """Score a document by cosine similarity to each trained label vector."""
    if model.label_vectors is None:
        raise ValueError("model has no label vectors")
    doc_vec = np.asarray(doc_vec, dtype=np.float64)
    if not np.any(doc_vec):
        raise ValueError("cannot classify a zero document vector")
    q = _unit(doc_vec)
    mat = model.label_vectors.astype(np.float64)
    norms = np.linalg.norm(mat, axis=1)
    norms[norms == 0] = 1.0
    sims = (mat @ q) / norms
    scores = {name: float(s) for name, s in zip(model.label_names, sims)}
    return Prediction(doc_id=doc_id, predicted_label=_argmax_label(scores), scores=scores)


def knn_classify(
    train_vectors: np.ndarray,
    train_labels: list[str],
    query: np.ndarray,
    k: int,
    doc_id: str = "",
) -> Prediction:
    """Majority vote over the k cosine-nearest training vectors.

    Vote ties break by higher summed similarity among the tied labels,
    then lexicographically; equal similarities at the neighbourhood
    boundary resolve by training order. The reported score per label is
    vote_count + (summed_similarity + k) / (2k + 1), a composite whose
    argmax reproduces exactly that rule.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    train_vectors = np.asarray(train_vectors, dtype=np.float64)
    n = train_vectors.shape[0]
    if k > n:
        raise ValueError(f"k={k} exceeds the {n} available training vectors")
    if len(train_labels) != n:
        raise ValueError("train_vectors and train_labels disagree in length")
    q = _unit(np.asarray(query, dtype=np.float64))
    norms = np.linalg.norm(train_vectors, axis=1)
    norms[norms == 0] = 1.0
    sims = (train_vectors @ q) / norms
    nearest = np.argsort(-sims, kind="stable")[:k]
    votes: dict[str, int] = {}
    sim_sums: dict[str, float] = {}
    for i in nearest:
        label = train_labels[i]
        votes[label] = votes.get(label, 0) + 1
        sim_sums[label] = sim_sums.get(label, 0.0) + sims[i]
    scores = {
        label: votes[label] + (sim_sums[label] + k) / (2 * k + 1) for label in votes
    }
    return Prediction(doc_id=doc_id, predicted_label=_argmax_label(scores), scores=scores)


@dataclass
class LinearModel:
    """Multinomial softmax parameters; rows align with classes."""

    classes: list[str]
    weights: np.ndarray
    bias: np.ndarray
    epoch_losses: list[float] = field(default_factory=list)

    def __post_init__(self):
        if self.weights.shape[0] != len(self.classes) or self.bias.shape[0] != len(self.classes):
            raise ValueError("parameter rows must correspond 1:1 to classes")
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias))):
            raise ValueError("non-finite linear model parameters")


def softmax(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(z - z.max())
    return e / e.sum()


def linear_example_loss(
    weights: np.ndarray, bias: np.ndarray, x: np.ndarray, class_index: int, l2: float
) -> float:
    """Per-example objective: cross-entropy plus (l2/2)·||W||²."""
    p = softmax(weights @ x + bias)
    return float(-np.log(p[class_index]) + 0.5 * l2 * np.sum(weights * weights))


def linear_example_grads(
    weights: np.ndarray, bias: np.ndarray, x: np.ndarray, class_index: int, l2: float
) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of linear_example_loss with respect to weights and bias.
    These are exactly the steps train_linear applies."""
    p = softmax(weights @ x + bias)
    p[class_index] -= 1.0
    return np.outer(p, x) + l2 * weights, p


def train_linear(
    vectors: np.ndarray,
    labels: list[str],
    epochs: int = 30,
    lr: float = 0.5,
    l2: float = 1e-4,
    seed: int = 0,
) -> LinearModel:
    """SGD on the softmax cross-entropy with L2 penalty.

    Parameters start at zero, so a zero-epoch model predicts uniform
    probabilities. Examples are visited in a seeded shuffle per epoch
    with the step size decaying as lr / (1 + epoch/10).
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    n = vectors.shape[0]
    if len(labels) != n:
        raise ValueError("vectors and labels disagree in length")
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise ValueError(f"need at least 2 classes, got {len(classes)}")
    if epochs < 0:
        raise ValueError(f"epochs must be >= 0, got {epochs}")
    class_index = {c: i for i, c in enumerate(classes)}
    y = np.array([class_index[label] for label in labels], dtype=np.int64)
    weights = np.zeros((len(classes), vectors.shape[1]), dtype=np.float64)
    bias = np.zeros(len(classes), dtype=np.float64)
    rng = np.random.default_rng(seed)
    epoch_losses = []
    for epoch in range(epochs):
        step = lr / (1.0 + epoch / 10.0)
        total = 0.0
        for i in rng.permutation(n):
            total += linear_example_loss(weights, bias, vectors[i], y[i], l2)
            gw, gb = linear_example_grads(weights, bias, vectors[i], y[i], l2)
            weights -= step * gw
            bias -= step * gb
        epoch_losses.append(total / n)
    return LinearModel(classes=classes, weights=weights, bias=bias, epoch_losses=epoch_losses)


def linear_classify(model: LinearModel, query: np.ndarray, doc_id: str = "") -> Prediction:
    """Softmax probabilities under a trained linear model."""
    p = softmax(model.weights @ np.asarray(query, dtype=np.float64) + model.bias)
    scores = {c: float(v) for c, v in zip(model.classes, p)}
    return Prediction(doc_id=doc_id, predicted_label=_argmax_label(scores), scores=scores)


def write_predictions_jsonl(
    path: str | Path, predictions: list[Prediction], truths: dict[str, str | None]
) -> None:
    """Export predictions, one JSON object per line:
    {doc_id, true_label, predicted_label, scores}."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for pred in predictions:
            fh.write(json.dumps(pred.to_dict(truths.get(pred.doc_id)), sort_keys=True) + "\n")
