"""Per-class F1 scoring, confusion matrices, and asymmetric-confusion
analysis."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


@dataclass
class ConfusionMatrix:
    """Counts with rows as true labels and columns as predicted labels."""

    classes: list[str]
    counts: np.ndarray

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        c = len(self.classes)
        if self.counts.shape != (c, c):
            raise ValueError(
                f"counts must be {c}x{c} for {c} classes, got {self.counts.shape}"
            )
        if np.any(self.counts < 0):
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def row_sums(self) -> dict[str, int]:
        return {c: int(s) for c, s in zip(self.classes, self.counts.sum(axis=1))}

    def to_dict(self) -> dict:
        return {"classes": list(self.classes), "counts": self.counts.tolist()}


@dataclass
class EvalReport:
    per_class_f1: dict[str, float]
    average_f1: float
    confusion: ConfusionMatrix
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "per_class_f1": {k: float(v) for k, v in self.per_class_f1.items()},
            "average_f1": float(self.average_f1),
            "confusion": self.confusion.to_dict(),
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        cm = ConfusionMatrix(
            classes=list(data["confusion"]["classes"]),
            counts=np.array(data["confusion"]["counts"], dtype=np.int64),
        )
        return cls(
            per_class_f1=dict(data["per_class_f1"]),
            average_f1=float(data["average_f1"]),
            confusion=cm,
            metadata=dict(data.get("metadata", {})),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def confusion(
    truths: list[str], predictions: list[str], classes: list[str]
) -> ConfusionMatrix:
    """Tally counts[i][j] = number of documents with true class i predicted
    as class j."""
    if len(truths) != len(predictions):
        raise ValueError("truths and predictions disagree in length")
    index = {c: i for i, c in enumerate(classes)}
    if len(index) != len(classes):
        raise ValueError("duplicate class names")
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(truths, predictions):
        if t not in index:
            raise ValueError(f"unknown true label {t!r}")
        if p not in index:
            raise ValueError(f"unknown predicted label {p!r}")
        counts[index[t], index[p]] += 1
    return ConfusionMatrix(classes=list(classes), counts=counts)


def f1_scores(cm: ConfusionMatrix, metadata: dict | None = None) -> EvalReport:
    """One-vs-rest precision/recall/F1 per class and their macro mean.

    F1 is defined as 0 when precision + recall is 0, so empty classes
    never produce NaN.
    """
    counts = cm.counts
    per_class: dict[str, float] = {}
    for i, name in enumerate(cm.classes):
        tp = counts[i, i]
        fp = counts[:, i].sum() - tp
        fn = counts[i, :].sum() - tp
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        if precision + recall == 0.0:
            per_class[name] = 0.0
        else:
            per_class[name] = 2.0 * precision * recall / (precision + recall)
    average = float(np.mean(list(per_class.values())))
    return EvalReport(
        per_class_f1=per_class,
        average_f1=average,
        confusion=cm,
        metadata=dict(metadata or {}),
    )


@dataclass
class AsymmetryReport:
    """Per-class confusion targets plus one-directional confusion pairs.

    entries[class] lists (other_class, rate) with rate = count / row sum,
    sorted by descending rate then name, nonzero rates only. flags holds
    pairs (x, y) where y reaches x's top_k (ties included) but x does not
    reach y's.
    """

    entries: dict[str, list[tuple[str, float]]]
    flags: list[tuple[str, str]]

    def to_dict(self) -> dict:
        return {
            "entries": {
                k: [[name, rate] for name, rate in v] for k, v in self.entries.items()
            },
            "flags": [list(pair) for pair in self.flags],
        }


def asymmetry_report(cm: ConfusionMatrix, top_k: int = 1) -> AsymmetryReport:
    if top_k < 1:
        raise ValueError(f"top_k must be >= 1, got {top_k}")
    entries: dict[str, list[tuple[str, float]]] = {}
    counts = cm.counts
    for i, name in enumerate(cm.classes):
        row_sum = counts[i, :].sum()
        if row_sum == 0:
            continue
        row = [
            (other, counts[i, j] / row_sum)
            for j, other in enumerate(cm.classes)
            if j != i and counts[i, j] > 0
        ]
        if row:
            row.sort(key=lambda item: (-item[1], item[0]))
            entries[name] = row
    top_rates = {
        name: rows[min(top_k, len(rows)) - 1][1] for name, rows in entries.items()
    }

    def in_top(x: str, y: str) -> bool:
        """Is y within x's top_k confusion targets (rate ties included)?"""
        if x not in entries:
            return False
        for other, rate in entries[x]:
            if rate < top_rates[x]:
                return False
            if other == y:
                return True
        return False

    flags = []
    for x in cm.classes:
        for y in cm.classes:
            if x != y and in_top(x, y) and not in_top(y, x):
                flags.append((x, y))
    return AsymmetryReport(entries=entries, flags=flags)


def format_confusion(cm: ConfusionMatrix) -> str:
    """Aligned ASCII table; rows are true labels, columns predictions."""
    width = max([len(c) for c in cm.classes] + [len(str(cm.counts.max(initial=0)))]) + 2
    header = " " * width + "".join(f"{c:>{width}}" for c in cm.classes)
    lines = [header]
    for name, row in zip(cm.classes, cm.counts):
        lines.append(f"{name:>{width}}" + "".join(f"{v:>{width}}" for v in row))
    return "\n".join(lines)


def format_report(report: EvalReport) -> str:
    width = max(len(c) for c in report.per_class_f1) + 2
    lines = ["per-class F1"]
    for name in report.per_class_f1:
        lines.append(f"{name:>{width}}  {report.per_class_f1[name]:.4f}")
    lines.append(f"{'average':>{width}}  {report.average_f1:.4f}")
    lines.append("")
    lines.append(format_confusion(report.confusion))
    return "\n".join(lines)
