"""Word-analogy benchmark: parse questions-words files and score word
vectors by vector-offset ranking (cosine over unit-normalized vectors)."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embed import EmbeddingModel


@dataclass
class AnalogySet:
    """Ordered categories of (a, b, c, expected) word quadruples."""

    categories: list[tuple[str, list[tuple[str, str, str, str]]]]

    @property
    def n_questions(self) -> int:
        return sum(len(qs) for _, qs in self.categories)


@dataclass
class CategoryResult:
    name: str
    attempted: int
    skipped_oov: int
    correct: int

    @property
    def accuracy(self) -> float:
        """Percent correct over attempted questions (0 when none attempted)."""
        if self.attempted == 0:
            return 0.0
        return 100.0 * self.correct / self.attempted

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "attempted": self.attempted,
            "skipped_oov": self.skipped_oov,
            "correct": self.correct,
            "accuracy": self.accuracy,
        }


@dataclass
class AnalogyReport:
    categories: list[CategoryResult]

    @property
    def attempted(self) -> int:
        return sum(c.attempted for c in self.categories)

    @property
    def skipped_oov(self) -> int:
        return sum(c.skipped_oov for c in self.categories)

    @property
    def correct(self) -> int:
        return sum(c.correct for c in self.categories)

    @property
    def overall_accuracy(self) -> float:
        if self.attempted == 0:
            return 0.0
        return 100.0 * self.correct / self.attempted

    def to_dict(self) -> dict:
        return {
            "categories": [c.to_dict() for c in self.categories],
            "attempted": self.attempted,
            "skipped_oov": self.skipped_oov,
            "correct": self.correct,
            "overall_accuracy": self.overall_accuracy,
        }


def format_analogy_report(report: AnalogyReport) -> str:
    """Aligned table with accuracies printed to two decimals."""
    width = max([len(c.name) for c in report.categories] + [len("overall")]) + 2
    lines = [f"{'category':>{width}}  accuracy  correct/attempted  skipped"]
    for c in report.categories:
        lines.append(
            f"{c.name:>{width}}  {c.accuracy:8.2f}  {c.correct:>7}/{c.attempted:<9} "
            f"{c.skipped_oov:>7}"
        )
    lines.append(
        f"{'overall':>{width}}  {report.overall_accuracy:8.2f}  "
        f"{report.correct:>7}/{report.attempted:<9} {report.skipped_oov:>7}"
    )
    return "\n".join(lines)


def load_analogies(path: str | Path) -> AnalogySet:
    """Parse the questions-words format: lines ": name" open a category,
    every other non-empty line holds exactly four whitespace-separated
    words. Words are lowercased to match the tokenizer's casing."""
    path = Path(path)
    categories: list[tuple[str, list[tuple[str, str, str, str]]]] = []
    seen: set[str] = set()
    current: list[tuple[str, str, str, str]] | None = None
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith(":"):
                name = stripped[1:].strip()
                if not name:
                    raise ValueError(f"{path.name}: line {line_no}: empty category name")
                if name in seen:
                    raise ValueError(
                        f"{path.name}: line {line_no}: duplicate category {name!r}"
                    )
                seen.add(name)
                current = []
                categories.append((name, current))
                continue
            words = stripped.split()
            if len(words) != 4:
                raise ValueError(
                    f"{path.name}: line {line_no}: expected 4 words, got {len(words)}"
                )
            if current is None:
                raise ValueError(
                    f"{path.name}: line {line_no}: question before any ': category' header"
                )
            current.append(tuple(w.lower() for w in words))
    return AnalogySet(categories=categories)


def _normalize_rows(matrix: np.ndarray) -> np.ndarray:
    unit = matrix.astype(np.float64)
    norms = np.linalg.norm(unit, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return unit / norms


def analogy_eval_vectors(
    tokens: list[str],
    vectors: np.ndarray,
    analogy_set: AnalogySet,
    restrict_vocab: int | None = None,
) -> AnalogyReport:
    """Score an analogy set against raw (token, vector) rows.

    For each question a:b :: c:?, the prediction is the vocabulary word
    maximizing cosine(v, v_b - v_a + v_c) on unit-normalized vectors with
    a, b, c excluded from candidates. Questions with any word out of
    vocabulary count as skipped, not attempted. restrict_vocab limits
    both candidates and questions to the first N rows.
    """
    if len(tokens) == 0:
        raise ValueError("empty vocabulary")
    if len(tokens) != vectors.shape[0]:
        raise ValueError("tokens and vectors disagree in length")
    limit = len(tokens) if restrict_vocab is None else min(restrict_vocab, len(tokens))
    if limit < 1:
        raise ValueError(f"restrict_vocab must keep at least one word, got {restrict_vocab}")
    index = {t: i for i, t in enumerate(tokens[:limit])}
    unit = _normalize_rows(vectors[:limit])
    results = []
    for name, questions in analogy_set.categories:
        usable = []
        skipped = 0
        for q in questions:
            if all(w in index for w in q):
                usable.append(tuple(index[w] for w in q))
            else:
                skipped += 1
        correct = 0
        if usable:
            quads = np.array(usable, dtype=np.int64)
            targets = unit[quads[:, 1]] - unit[quads[:, 0]] + unit[quads[:, 2]]
            scores = targets @ unit.T
            rows = np.arange(len(usable))
            for col in range(3):
                scores[rows, quads[:, col]] = -np.inf
            predicted = scores.argmax(axis=1)
            correct = int((predicted == quads[:, 3]).sum())
        results.append(
            CategoryResult(
                name=name, attempted=len(usable), skipped_oov=skipped, correct=correct
            )
        )
    return AnalogyReport(categories=results)


def analogy_eval(
    model: EmbeddingModel, analogy_set: AnalogySet, restrict_vocab: int | None = None
) -> AnalogyReport:
    """Run the benchmark over a trained model's word vectors."""
    return analogy_eval_vectors(
        model.vocab.index_to_token, model.in_vectors, analogy_set, restrict_vocab
    )
