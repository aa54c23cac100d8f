"""Binary and text serialization for embedding models.

Binary layout (version 1, all integers little-endian):
magic "LVEC", u32 version, length-prefixed JSON hyperparameter blob,
vocabulary (u32 count, length-prefixed UTF-8 tokens, u64 frequencies,
u32 min_count), u32 dim, the float32 input and output matrices, an
optional document block (ids, labels, matrix), an optional label block
(names, matrix), and the per-epoch loss trace. Matrices round-trip
bit-exactly.
"""

from __future__ import annotations

import json
import struct
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .embed import EmbeddingModel, Hyperparams
from .vocab import Vocabulary

MAGIC = b"LVEC"
FORMAT_VERSION = 1


def _write_u32(fh, value: int) -> None:
    fh.write(struct.pack("<I", value))


def _write_u64(fh, value: int) -> None:
    fh.write(struct.pack("<Q", value))


def _write_str(fh, s: str) -> None:
    raw = s.encode("utf-8")
    _write_u32(fh, len(raw))
    fh.write(raw)


def _write_matrix(fh, mat: np.ndarray) -> None:
    _write_u32(fh, mat.shape[0])
    fh.write(np.ascontiguousarray(mat, dtype="<f4").tobytes())


def _read_exact(fh, n: int) -> bytes:
    raw = fh.read(n)
    if len(raw) != n:
        raise ValueError("truncated model file")
    return raw


def _read_u32(fh) -> int:
    return struct.unpack("<I", _read_exact(fh, 4))[0]


def _read_u64(fh) -> int:
    return struct.unpack("<Q", _read_exact(fh, 8))[0]


def _read_str(fh) -> str:
    return _read_exact(fh, _read_u32(fh)).decode("utf-8")


def _read_matrix(fh, dim: int) -> np.ndarray:
    rows = _read_u32(fh)
    raw = _read_exact(fh, rows * dim * 4)
    return np.frombuffer(raw, dtype="<f4").reshape(rows, dim).astype(np.float32)


def save_model(model: EmbeddingModel, path: str | Path) -> None:
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(MAGIC)
        _write_u32(fh, FORMAT_VERSION)
        _write_str(fh, json.dumps(asdict(model.hyper), sort_keys=True))
        vocab = model.vocab
        _write_u32(fh, len(vocab))
        for token in vocab.index_to_token:
            _write_str(fh, token)
        for count in vocab.counts:
            _write_u64(fh, int(count))
        _write_u32(fh, vocab.min_count)
        _write_u32(fh, model.dim)
        _write_matrix(fh, model.in_vectors)
        _write_matrix(fh, model.out_vectors)
        if model.doc_vectors is not None:
            fh.write(b"\x01")
            _write_u32(fh, len(model.doc_ids))
            for doc_id in model.doc_ids:
                _write_str(fh, doc_id)
            for label in model.doc_labels:
                _write_str(fh, label)
            _write_matrix(fh, model.doc_vectors)
        else:
            fh.write(b"\x00")
        if model.label_vectors is not None:
            fh.write(b"\x01")
            _write_u32(fh, len(model.label_names))
            for name in model.label_names:
                _write_str(fh, name)
            _write_matrix(fh, model.label_vectors)
        else:
            fh.write(b"\x00")
        _write_u32(fh, len(model.epoch_losses))
        for loss in model.epoch_losses:
            fh.write(struct.pack("<d", loss))


def load_model(path: str | Path) -> EmbeddingModel:
    path = Path(path)
    with path.open("rb") as fh:
        if _read_exact(fh, 4) != MAGIC:
            raise ValueError(f"{path.name}: not a model file (bad magic)")
        version = _read_u32(fh)
        if version != FORMAT_VERSION:
            raise ValueError(
                f"{path.name}: unsupported model format version {version} "
                f"(expected {FORMAT_VERSION})"
            )
        hyper = Hyperparams(**json.loads(_read_str(fh)))
        n_tokens = _read_u32(fh)
        tokens = [_read_str(fh) for _ in range(n_tokens)]
        counts = np.array([_read_u64(fh) for _ in range(n_tokens)], dtype=np.int64)
        min_count = _read_u32(fh)
        vocab = Vocabulary(index_to_token=tokens, counts=counts, min_count=min_count)
        dim = _read_u32(fh)
        in_vectors = _read_matrix(fh, dim)
        out_vectors = _read_matrix(fh, dim)
        doc_vectors = doc_ids = doc_labels = None
        if _read_exact(fh, 1) == b"\x01":
            n_docs = _read_u32(fh)
            doc_ids = [_read_str(fh) for _ in range(n_docs)]
            doc_labels = [_read_str(fh) for _ in range(n_docs)]
            doc_vectors = _read_matrix(fh, dim)
        label_vectors = label_names = None
        if _read_exact(fh, 1) == b"\x01":
            n_labels = _read_u32(fh)
            label_names = [_read_str(fh) for _ in range(n_labels)]
            label_vectors = _read_matrix(fh, dim)
        n_losses = _read_u32(fh)
        losses = [
            struct.unpack("<d", _read_exact(fh, 8))[0] for _ in range(n_losses)
        ]
        if fh.read(1):
            raise ValueError(f"{path.name}: trailing bytes after model data")
    return EmbeddingModel(
        vocab=vocab, hyper=hyper, in_vectors=in_vectors, out_vectors=out_vectors,
        doc_vectors=doc_vectors, doc_ids=doc_ids, doc_labels=doc_labels,
        label_vectors=label_vectors, label_names=label_names, epoch_losses=losses,
    )


def export_text(model: EmbeddingModel, path: str | Path) -> None:
    """Write word vectors in the classic text format: a "V dim" header,
    then one "token v1 ... vdim" line per word. Values are printed with
    round-trippable precision."""
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(f"{len(model.vocab)} {model.dim}\n")
        for i, token in enumerate(model.vocab.index_to_token):
            values = " ".join(repr(float(v)) for v in model.in_vectors[i])
            fh.write(f"{token} {values}\n")


def read_text_vectors(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Parse the text vector format back into (tokens, float32 matrix)."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path.name}: header must be 'V dim'")
        n_rows, dim = int(header[0]), int(header[1])
        tokens = []
        matrix = np.empty((n_rows, dim), dtype=np.float32)
        for i in range(n_rows):
            parts = fh.readline().split()
            if len(parts) != dim + 1:
                raise ValueError(f"{path.name}: line {i + 2} has {len(parts)} fields, "
                                 f"expected {dim + 1}")
            tokens.append(parts[0])
            matrix[i] = [float(v) for v in parts[1:]]
    return tokens, matrix
