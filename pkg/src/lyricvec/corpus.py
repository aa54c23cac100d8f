"""Corpus ingestion, tokenization, deduplication, and train/test splitting.

Documents are plain records (id, text, tokens, optional class label,
optional 1-5 rating). All randomized operations take an explicit seed and
are bit-reproducible for a given (input, seed) pair.
"""

from __future__ import annotations

import csv
import json
import re
import unicodedata
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

SHINGLE_SIZE = 3

_BRACKET_RE = re.compile(r"\[[^\]]*\]")
# word characters minus underscore, apostrophes kept only inside a token
_TOKEN_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*")
# curly quote and modifier letter apostrophe fold to ASCII apostrophe
_APOSTROPHE_TRANS = str.maketrans({"’": "'", "ʼ": "'"})


@dataclass
class Document:
    """One text item with optional class label and optional 1-5 rating."""

    id: str
    text: str
    tokens: list[str] = field(default_factory=list)
    label: str | None = None
    rating: int | None = None

    def __post_init__(self):
        if self.rating is not None and self.rating not in (1, 2, 3, 4, 5):
            raise ValueError(
                f"document {self.id!r}: rating must be in 1..5, got {self.rating!r}"
            )


@dataclass
class Corpus:
    """An ordered collection of documents with unique ids.

    The document list must not be mutated after construction; derive new
    corpora via the module functions instead.
    """

    documents: list[Document]
    provenance: str = ""

    def __post_init__(self):
        index: dict[str, Document] = {}
        for doc in self.documents:
            if doc.id in index:
                raise ValueError(f"duplicate document id: {doc.id!r}")
            index[doc.id] = doc
        self._by_id = index

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def __getitem__(self, doc_id: str) -> Document:
        return self._by_id[doc_id]

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._by_id

    @property
    def label_set(self) -> set[str]:
        return {d.label for d in self.documents if d.label is not None}

    def labeled(self) -> list[Document]:
        return [d for d in self.documents if d.label is not None]


@dataclass
class DatasetVersion:
    """One seeded stratified train/test split, stored as document ids."""

    seed: int
    train: list[str]
    test: list[str]
    per_class_counts: dict[str, tuple[int, int]]

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "train": list(self.train),
            "test": list(self.test),
            "per_class_counts": {k: list(v) for k, v in self.per_class_counts.items()},
        }


@dataclass
class DedupReport:
    """Which documents were removed and which near-duplicate they map to."""

    removed_ids: list[str]
    kept_for: dict[str, str]
    threshold: float

    def to_dict(self) -> dict:
        return {
            "removed_ids": list(self.removed_ids),
            "kept_for": dict(self.kept_for),
            "threshold": self.threshold,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def tokenize(text: str) -> list[str]:
    """Normalize raw text into a token list.

    Rules: Unicode NFC normalization, lowercasing, bracketed annotation
    segments such as "[Chorus]" removed, punctuation stripped except
    apostrophes inside a token (curly apostrophes folded to ASCII).
    Empty input yields an empty list.
    """
    text = unicodedata.normalize("NFC", text)
    text = unicodedata.normalize("NFC", text.lower())
    text = text.translate(_APOSTROPHE_TRANS)
    text = _BRACKET_RE.sub(" ", text)
    return _TOKEN_RE.findall(text)


def _parse_rating(value, where: str) -> int | None:
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{where}: rating must be an integer 1..5, got {value!r}")
    if value not in (1, 2, 3, 4, 5):
        raise ValueError(f"{where}: rating must be in 1..5, got {value!r}")
    return value


def _ingest_jsonl(path: Path) -> list[Document]:
    docs = []
    with path.open("r", encoding="utf-8") as fh:
        record_no = 0
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            record_no += 1
            where = f"{path.name}: line {line_no}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{where}: invalid JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise ValueError(f"{where}: expected a JSON object")
            text = record.get("text")
            if not isinstance(text, str):
                raise ValueError(f"{where}: missing required string field 'text'")
            doc_id = record.get("id")
            if doc_id is None:
                doc_id = f"doc{record_no}"
            elif not isinstance(doc_id, str):
                raise ValueError(f"{where}: 'id' must be a string")
            label = record.get("genre")
            if label is not None and not isinstance(label, str):
                raise ValueError(f"{where}: 'genre' must be a string")
            rating = _parse_rating(record.get("rating"), where)
            docs.append(
                Document(id=doc_id, text=text, tokens=tokenize(text), label=label, rating=rating)
            )
    return docs


def _ingest_csv(path: Path) -> list[Document]:
    docs = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "text" not in reader.fieldnames:
            raise ValueError(f"{path.name}: CSV header must include a 'text' column")
        for record_no, row in enumerate(reader, start=1):
            where = f"{path.name}: line {reader.line_num}"
            text = row.get("text")
            if text is None:
                raise ValueError(f"{where}: missing 'text' value")
            doc_id = row.get("id") or f"doc{record_no}"
            label = row.get("genre") or None
            raw_rating = row.get("rating")
            rating = None
            if raw_rating not in (None, ""):
                try:
                    rating = int(raw_rating)
                except ValueError:
                    raise ValueError(
                        f"{where}: rating must be an integer 1..5, got {raw_rating!r}"
                    ) from None
                rating = _parse_rating(rating, where)
            docs.append(
                Document(id=doc_id, text=text, tokens=tokenize(text), label=label, rating=rating)
            )
    return docs


def ingest(path: str | Path, format: str = "jsonl") -> Corpus:
    """Read a corpus from JSONL or CSV.

    JSONL fields: id (optional, autogenerated as "doc<N>" when absent),
    text (required), genre (optional), rating (optional integer 1-5).
    CSV uses the same field names in the header row. Malformed records
    raise ValueError naming the offending line.
    """
    path = Path(path)
    if not path.exists():
        raise ValueError(f"no such file: {path}")
    if format == "jsonl":
        docs = _ingest_jsonl(path)
    elif format == "csv":
        docs = _ingest_csv(path)
    else:
        raise ValueError(f"unknown corpus format: {format!r} (expected 'jsonl' or 'csv')")
    return Corpus(documents=docs, provenance=str(path))


def write_jsonl(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus in the canonical JSONL input format."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for doc in corpus:
            record = {"id": doc.id, "text": doc.text}
            if doc.label is not None:
                record["genre"] = doc.label
            if doc.rating is not None:
                record["rating"] = doc.rating
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def shingle_set(tokens: list[str], size: int = SHINGLE_SIZE) -> set[tuple[str, ...]]:
    """Contiguous token n-grams; shorter documents yield one whole-document
    shingle so that byte-identical short texts still compare equal."""
    if len(tokens) >= size:
        return {tuple(tokens[i : i + size]) for i in range(len(tokens) - size + 1)}
    return {tuple(tokens)}


def jaccard(a: set, b: set) -> float:
    union = len(a | b)
    if union == 0:
        return 1.0
    return len(a & b) / union


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller index becomes the root so the survivor is first-ingested
            if ra > rb:
                ra, rb = rb, ra
            self.parent[rb] = ra


def dedup(corpus: Corpus, threshold: float = 0.8) -> tuple[Corpus, DedupReport]:
    """Remove near-duplicate documents.

    Two documents are near-duplicates when the Jaccard similarity of their
    3-token shingle sets is >= threshold; the relation is closed
    transitively and only the first-ingested document of each group
    survives. Candidate pairs are found through a shingle inverted index,
    which is lossless for threshold > 0 (a positive Jaccard requires a
    shared shingle).
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    docs = corpus.documents
    n = len(docs)
    uf = _UnionFind(n)
    if threshold == 0.0:
        # every pair trivially satisfies Jaccard >= 0
        for i in range(1, n):
            uf.union(0, i)
    else:
        shingles = [shingle_set(d.tokens) for d in docs]
        bucket: dict[tuple[str, ...], list[int]] = {}
        for i, sh in enumerate(shingles):
            for s in sh:
                bucket.setdefault(s, []).append(i)
        seen_pairs: set[tuple[int, int]] = set()
        for members in bucket.values():
            if len(members) < 2:
                continue
            for a in range(len(members)):
                for b in range(a + 1, len(members)):
                    pair = (members[a], members[b])
                    if pair in seen_pairs:
                        continue
                    seen_pairs.add(pair)
                    if jaccard(shingles[pair[0]], shingles[pair[1]]) >= threshold:
                        uf.union(*pair)

    survivor: dict[int, int] = {}
    for i in range(n):
        root = uf.find(i)
        if root not in survivor:
            survivor[root] = i
    removed_ids = []
    kept_for = {}
    kept_docs = []
    for i, doc in enumerate(docs):
        root = uf.find(i)
        if survivor[root] == i:
            kept_docs.append(doc)
        else:
            removed_ids.append(doc.id)
            kept_for[doc.id] = docs[survivor[root]].id
    report = DedupReport(removed_ids=removed_ids, kept_for=kept_for, threshold=threshold)
    deduped = Corpus(documents=kept_docs, provenance=corpus.provenance)
    return deduped, report


def _usable_by_class(corpus: Corpus) -> dict[str, list[Document]]:
    """Labeled documents with non-empty token lists, grouped by class."""
    groups: dict[str, list[Document]] = {}
    for doc in corpus:
        if doc.label is not None and doc.tokens:
            groups.setdefault(doc.label, []).append(doc)
    return groups


def undersample(corpus: Corpus, per_class: int, seed: int) -> Corpus:
    """Balance classes by keeping exactly per_class documents of each class,
    chosen uniformly at random without replacement. Unlabeled and
    empty-token documents are excluded."""
    if per_class < 1:
        raise ValueError(f"per_class must be >= 1, got {per_class}")
    groups = _usable_by_class(corpus)
    if not groups:
        raise ValueError("corpus has no labeled documents with tokens")
    for label in sorted(groups):
        if len(groups[label]) < per_class:
            raise ValueError(
                f"class {label!r} has only {len(groups[label])} usable documents, "
                f"need {per_class}"
            )
    rng = np.random.default_rng(seed)
    selected: set[str] = set()
    for label in sorted(groups):
        docs = groups[label]
        chosen = rng.choice(len(docs), size=per_class, replace=False)
        selected.update(docs[i].id for i in chosen)
    kept = [d for d in corpus if d.id in selected]
    return Corpus(documents=kept, provenance=corpus.provenance)


def split(corpus: Corpus, train_fraction: float, seed: int) -> DatasetVersion:
    """Stratified per-class train/test split.

    Every document must be labeled; documents with empty token lists are
    excluded. Each class's test share deviates from (1 - train_fraction)
    by at most one document.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    for doc in corpus:
        if doc.label is None:
            raise ValueError(f"cannot split: document {doc.id!r} has no label")
    groups = _usable_by_class(corpus)
    if not groups:
        raise ValueError("corpus has no usable documents")
    rng = np.random.default_rng(seed)
    train_ids: list[str] = []
    test_ids: list[str] = []
    per_class_counts: dict[str, tuple[int, int]] = {}
    for label in sorted(groups):
        docs = groups[label]
        n = len(docs)
        if n < 2:
            raise ValueError(f"class {label!r} has fewer than 2 documents, cannot split")
        n_train = int(round(train_fraction * n))
        n_train = min(max(n_train, 1), n - 1)
        order = rng.permutation(n)
        train_ids.extend(docs[i].id for i in order[:n_train])
        test_ids.extend(docs[i].id for i in order[n_train:])
        per_class_counts[label] = (n_train, n - n_train)
    return DatasetVersion(
        seed=seed, train=train_ids, test=test_ids, per_class_counts=per_class_counts
    )


def binarize_popularity(corpus: Corpus, seed: int = 0) -> Corpus:
    """Relabel documents by rating: "low" for 1-3, "high" for 4-5.

    Unrated documents are dropped. When both classes are present the
    larger one is undersampled to the smaller one's count under seed.
    """
    relabeled = []
    for doc in corpus:
        if doc.rating is None:
            continue
        label = "low" if doc.rating <= 3 else "high"
        relabeled.append(replace(doc, label=label))
    binary = Corpus(documents=relabeled, provenance=corpus.provenance)
    counts = {label: 0 for label in ("low", "high")}
    for doc in binary:
        if doc.tokens:
            counts[doc.label] += 1
    if counts["low"] == 0 or counts["high"] == 0:
        return binary
    return undersample(binary, min(counts.values()), seed)


def sample_to_size(corpus: Corpus, target_bytes: int, seed: int) -> Corpus:
    """Take documents in seeded random order until their cumulative UTF-8
    text size first reaches target_bytes."""
    if target_bytes < 1:
        raise ValueError(f"target_bytes must be >= 1, got {target_bytes}")
    sizes = [len(doc.text.encode("utf-8")) for doc in corpus]
    total = sum(sizes)
    if total < target_bytes:
        raise ValueError(
            f"corpus holds {total} bytes of text, smaller than target {target_bytes}"
        )
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(corpus.documents))
    picked = []
    cumulative = 0
    for i in order:
        picked.append(corpus.documents[i])
        cumulative += sizes[i]
        if cumulative >= target_bytes:
            break
    return Corpus(documents=picked, provenance=corpus.provenance)
