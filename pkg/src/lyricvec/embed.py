"""Word and document embedding training on the negative-sampling objective.

Four modes share one update rule. In "skipgram" each context word's input
vector predicts the centre word; in "cbow" the mean of the context
predicts it. The document modes additionally learn one vector per
training document and one per class label: "pvdm" folds the document and
label vectors into the context mean, "pvdbow" lets each of them predict
the document's words directly. Label vectors are what the classifiers
downstream compare documents against.

Training runs in compiled kernels (see _kernels). Multiple workers share
the parameter matrices without locking, so results are reproducible only
at workers=1; the per-document RNG streams and the learning-rate schedule
are worker-independent by construction.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field, replace as dc_replace

import numpy as np

from . import _kernels
from .corpus import Corpus
from .vocab import Vocabulary, build_negative_table, build_vocab, keep_probs

WORD_MODES = ("skipgram", "cbow")
DOC_MODES = ("pvdm", "pvdbow")


@dataclass(frozen=True)
class Hyperparams:
    dim: int = 300
    window: int = 5
    negatives: int = 5
    epochs: int = 20
    lr_initial: float = 0.025
    lr_final: float = 0.0001
    subsample_t: float = 1e-4
    mode: str = "pvdm"
    seed: int = 1
    workers: int = 1
    min_count: int = 5

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if self.negatives < 1:
            raise ValueError(f"negatives must be >= 1, got {self.negatives}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not self.lr_initial >= self.lr_final > 0:
            raise ValueError(
                f"need lr_initial >= lr_final > 0, got {self.lr_initial}, {self.lr_final}"
            )
        if self.mode not in WORD_MODES + DOC_MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.min_count < 1:
            raise ValueError(f"min_count must be >= 1, got {self.min_count}")

    def with_overrides(self, **kwargs) -> "Hyperparams":
        return dc_replace(self, **kwargs)


@dataclass
class EmbeddingModel:
    """Trained parameters plus the vocabulary that indexes them.

    in_vectors / out_vectors are the word input and output matrices.
    Document modes also carry doc_vectors (one row per training document,
    aligned with doc_ids and doc_labels) and label_vectors (one row per
    class in label_names, sorted). Immutable after training; safe for
    concurrent readers.
    """

    vocab: Vocabulary
    hyper: Hyperparams
    in_vectors: np.ndarray
    out_vectors: np.ndarray
    doc_vectors: np.ndarray | None = None
    doc_ids: list[str] | None = None
    doc_labels: list[str] | None = None
    label_vectors: np.ndarray | None = None
    label_names: list[str] | None = None
    epoch_losses: list[float] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.in_vectors.shape[1]

    def word_vector(self, token: str) -> np.ndarray:
        return self.in_vectors[self.vocab.token_to_index[token]]

    def doc_vector(self, doc_id: str) -> np.ndarray:
        if self.doc_vectors is None:
            raise ValueError("model has no document vectors")
        return self.doc_vectors[self.doc_ids.index(doc_id)]

    def label_vector(self, label: str) -> np.ndarray:
        if self.label_vectors is None:
            raise ValueError("model has no label vectors")
        return self.label_vectors[self.label_names.index(label)]


def _init_matrix(rng: np.random.Generator, rows: int, dim: int) -> np.ndarray:
    return ((rng.random((rows, dim), dtype=np.float32) - 0.5) / dim).astype(np.float32)


class _Prepared:
    """Encoded corpus plus the arrays the kernels consume."""

    def __init__(self, corpus: Corpus, hyper: Hyperparams):
        self.vocab = build_vocab(corpus, min_count=hyper.min_count)
        encoded = [self.vocab.encode(doc.tokens) for doc in corpus]
        lengths = np.array([len(e) for e in encoded], dtype=np.int64)
        self.tokens_flat = (
            np.concatenate(encoded) if encoded else np.empty(0, dtype=np.int32)
        ).astype(np.int32)
        self.doc_starts = np.zeros(len(encoded) + 1, dtype=np.int64)
        np.cumsum(lengths, out=self.doc_starts[1:])
        self.prefix_tokens = self.doc_starts[:-1].copy()
        self.total_tokens = int(lengths.sum())
        self.n_docs = len(encoded)
        self.cum = build_negative_table(self.vocab).cumulative
        self.subsample = hyper.subsample_t > 0
        if self.subsample:
            self.keep_prob = keep_probs(self.vocab, hyper.subsample_t)
        else:
            self.keep_prob = np.ones(len(self.vocab), dtype=np.float64)


def _train_epochs(run_shard, n_docs: int, hyper: Hyperparams) -> list[float]:
    """Drive epochs over document shards; threads share the matrices
    lock-free, so shard results are summed only for loss reporting."""
    all_docs = np.arange(n_docs, dtype=np.int64)
    workers = min(hyper.workers, max(1, n_docs))
    shards = [s for s in np.array_split(all_docs, workers) if len(s)]
    losses = []
    for epoch in range(hyper.epochs):
        if len(shards) == 1:
            results = [run_shard(shards[0], epoch)]
        else:
            results: list = [None] * len(shards)

            def work(i: int, shard: np.ndarray, epoch=epoch) -> None:
                results[i] = run_shard(shard, epoch)

            threads = [
                threading.Thread(target=work, args=(i, shard))
                for i, shard in enumerate(shards)
            ]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
        loss = sum(r[0] for r in results)
        pairs = sum(r[1] for r in results)
        losses.append(loss / pairs if pairs else 0.0)
    return losses


def _check_finite(model: EmbeddingModel) -> None:
    for mat in (model.in_vectors, model.out_vectors, model.doc_vectors, model.label_vectors):
        if mat is not None and not np.all(np.isfinite(mat)):
            raise FloatingPointError("training produced non-finite parameters")


def train_word2vec(corpus: Corpus, hyper: Hyperparams) -> EmbeddingModel:
    """Train word vectors with skip-gram or CBOW negative sampling."""
    if hyper.mode not in WORD_MODES:
        raise ValueError(f"word training requires mode in {WORD_MODES}, got {hyper.mode!r}")
    prep = _Prepared(corpus, hyper)
    if prep.total_tokens < hyper.window:
        raise ValueError(
            f"corpus has {prep.total_tokens} in-vocabulary tokens, "
            f"shorter than one window ({hyper.window})"
        )
    rng = np.random.default_rng(hyper.seed)
    w_in = _init_matrix(rng, len(prep.vocab), hyper.dim)
    w_out = np.zeros((len(prep.vocab), hyper.dim), dtype=np.float32)
    seed64 = np.uint64(hyper.seed)

    if hyper.mode == "skipgram":

        def run_shard(shard, epoch):
            return _kernels.skipgram_epoch(
                w_in, w_out, prep.tokens_flat, prep.doc_starts, shard,
                prep.keep_prob, prep.cum, hyper.window, hyper.negatives,
                hyper.lr_initial, hyper.lr_final, prep.total_tokens,
                prep.prefix_tokens, epoch, hyper.epochs, seed64, prep.subsample,
            )

    else:
        dummy = np.zeros((1, hyper.dim), dtype=np.float32)
        no_labels = np.zeros(prep.n_docs, dtype=np.int32)

        def run_shard(shard, epoch):
            return _kernels.context_epoch(
                w_in, w_out, dummy, dummy, no_labels, False, False,
                prep.tokens_flat, prep.doc_starts, shard,
                prep.keep_prob, prep.cum, hyper.window, hyper.negatives,
                hyper.lr_initial, hyper.lr_final, prep.total_tokens,
                prep.prefix_tokens, epoch, hyper.epochs, seed64, prep.subsample,
            )

    losses = _train_epochs(run_shard, prep.n_docs, hyper)
    model = EmbeddingModel(
        vocab=prep.vocab, hyper=hyper, in_vectors=w_in, out_vectors=w_out,
        epoch_losses=losses,
    )
    _check_finite(model)
    return model


def train_doc2vec(corpus: Corpus, hyper: Hyperparams) -> EmbeddingModel:
    """Jointly train word, document, and label vectors.

    Every document contributes through two handles: its own row in
    doc_vectors and its label's shared row in label_vectors.
    """
    if hyper.mode not in DOC_MODES:
        raise ValueError(f"document training requires mode in {DOC_MODES}, got {hyper.mode!r}")
    for doc in corpus:
        if doc.label is None:
            raise ValueError(f"document {doc.id!r} has no label; document training needs one")
    prep = _Prepared(corpus, hyper)
    label_names = sorted(corpus.label_set)
    label_index = {name: i for i, name in enumerate(label_names)}
    doc_label_row = np.array(
        [label_index[doc.label] for doc in corpus], dtype=np.int32
    )
    rng = np.random.default_rng(hyper.seed)
    w_in = _init_matrix(rng, len(prep.vocab), hyper.dim)
    doc_vecs = _init_matrix(rng, prep.n_docs, hyper.dim)
    label_vecs = _init_matrix(rng, len(label_names), hyper.dim)
    w_out = np.zeros((len(prep.vocab), hyper.dim), dtype=np.float32)
    seed64 = np.uint64(hyper.seed)

    if hyper.mode == "pvdm":

        def run_shard(shard, epoch):
            return _kernels.context_epoch(
                w_in, w_out, doc_vecs, label_vecs, doc_label_row, True, True,
                prep.tokens_flat, prep.doc_starts, shard,
                prep.keep_prob, prep.cum, hyper.window, hyper.negatives,
                hyper.lr_initial, hyper.lr_final, prep.total_tokens,
                prep.prefix_tokens, epoch, hyper.epochs, seed64, prep.subsample,
            )

    else:

        def run_shard(shard, epoch):
            return _kernels.dbow_epoch(
                w_out, doc_vecs, label_vecs, doc_label_row, True,
                prep.tokens_flat, prep.doc_starts, shard,
                prep.keep_prob, prep.cum, hyper.negatives,
                hyper.lr_initial, hyper.lr_final, prep.total_tokens,
                prep.prefix_tokens, epoch, hyper.epochs, seed64, prep.subsample,
            )

    losses = _train_epochs(run_shard, prep.n_docs, hyper)
    model = EmbeddingModel(
        vocab=prep.vocab, hyper=hyper, in_vectors=w_in, out_vectors=w_out,
        doc_vectors=doc_vecs, doc_ids=[d.id for d in corpus],
        doc_labels=[d.label for d in corpus],
        label_vectors=label_vecs, label_names=label_names,
        epoch_losses=losses,
    )
    _check_finite(model)
    return model


def infer_doc_vector(
    model: EmbeddingModel, tokens: list[str], steps: int = 50, seed: int = 0
) -> np.ndarray:
    """Fit a vector for an unseen document against frozen parameters.

    A fresh seeded vector takes `steps` gradient passes over the document;
    word, output, and label matrices are never touched, so inference
    cannot leak class information. OOV tokens are skipped.
    """
    if model.doc_vectors is None:
        raise ValueError("inference requires a model trained in a document mode")
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    encoded = model.vocab.encode(tokens)
    if len(encoded) == 0:
        raise ValueError("cannot infer a vector: every token is out of vocabulary")
    rng = np.random.default_rng(seed)
    vec = _init_matrix(rng, 1, model.dim)[0]
    if steps == 0:
        return vec
    cum = build_negative_table(model.vocab).cumulative
    hyper = model.hyper
    if hyper.mode == "pvdm":
        _kernels.infer_context_steps(
            vec, model.in_vectors, model.out_vectors, encoded, cum,
            hyper.window, hyper.negatives, hyper.lr_initial, hyper.lr_final,
            steps, np.uint64(seed),
        )
    else:
        _kernels.infer_dbow_steps(
            vec, model.out_vectors, encoded, cum,
            hyper.negatives, hyper.lr_initial, hyper.lr_final,
            steps, np.uint64(seed),
        )
    if not np.all(np.isfinite(vec)):
        raise FloatingPointError("inference produced a non-finite vector")
    return vec


def _sigmoid64(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def negative_sampling_loss(
    l1: np.ndarray, target_rows: np.ndarray, labels: np.ndarray
) -> float:
    """Double-precision objective for one input vector against stacked
    output rows with 0/1 labels: sum of -log sigmoid(+-z). This is the
    analytic form whose negative gradient, scaled by the learning rate,
    the compiled kernels apply."""
    z = target_rows.astype(np.float64) @ l1.astype(np.float64)
    signs = 1.0 - 2.0 * labels
    return float(np.logaddexp(0.0, signs * z).sum())


def negative_sampling_grads(
    l1: np.ndarray, target_rows: np.ndarray, labels: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of negative_sampling_loss with respect to l1 and rows."""
    l1 = l1.astype(np.float64)
    target_rows = target_rows.astype(np.float64)
    z = target_rows @ l1
    gz = _sigmoid64(z) - labels
    return gz @ target_rows, np.outer(gz, l1)


def mean_context_loss(
    contributors: np.ndarray, target_rows: np.ndarray, labels: np.ndarray
) -> float:
    """Objective when the input vector is the mean of contributor rows
    (context words, document vector, label vector)."""
    return negative_sampling_loss(
        contributors.astype(np.float64).mean(axis=0), target_rows, labels
    )


def mean_context_grads(
    contributors: np.ndarray, target_rows: np.ndarray, labels: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of mean_context_loss: each contributor receives the
    input gradient divided by the contributor count."""
    contributors = contributors.astype(np.float64)
    n = contributors.shape[0]
    g_l1, g_rows = negative_sampling_grads(contributors.mean(axis=0), target_rows, labels)
    return np.tile(g_l1 / n, (n, 1)), g_rows
