"""Clustering quality metrics: annotated-pair precision/recall, accuracy and NMI."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .model import InvalidInputError


@dataclass(frozen=True)
class PairAnnotation:
    a: str
    b: str
    same_topic: bool


def _labels(p) -> Mapping:
    return p.labels if hasattr(p, "labels") else p


def _check_pairs(annotations: Sequence[PairAnnotation], labels: Mapping) -> None:
    seen = set()
    for ann in annotations:
        for sid in (ann.a, ann.b):
            if sid not in labels:
                raise InvalidInputError(f"unknown story id {sid!r} in annotations")
        key = frozenset((ann.a, ann.b))
        if key in seen:
            raise InvalidInputError(f"duplicate annotated pair {(ann.a, ann.b)}")
        seen.add(key)


def pairwise_pr(partition, annotations: Sequence[PairAnnotation]) -> tuple:
    """Precision and recall of same-topic decisions over annotated story pairs.

    Zero denominators give 1 (no predicted positives -> precision 1, no true
    positives -> recall 1).
    """
    if not annotations:
        raise InvalidInputError("no annotated pairs")
    labels = _labels(partition)
    _check_pairs(annotations, labels)
    tp = fp = fn = 0
    for ann in annotations:
        predicted = labels[ann.a] == labels[ann.b]
        if predicted and ann.same_topic:
            tp += 1
        elif predicted:
            fp += 1
        elif ann.same_topic:
            fn += 1
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    return precision, recall


def pairs_from_truth(truth) -> list:
    """Annotate every unordered story pair from a ground-truth partition."""
    labels = _labels(truth)
    ids = sorted(labels)
    return [PairAnnotation(a, b, labels[a] == labels[b]) for a, b in combinations(ids, 2)]


def pairwise_f1(predicted, truth) -> float:
    p, r = pairwise_pr(predicted, pairs_from_truth(truth))
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def contingency(predicted, truth) -> np.ndarray:
    """Counts table with predicted clusters on rows, truth clusters on columns."""
    pl, tl = _labels(predicted), _labels(truth)
    if set(pl) != set(tl):
        raise InvalidInputError("predicted and truth partitions cover different stories")
    ids = sorted(pl)
    rows = {lab: i for i, lab in enumerate(sorted({pl[s] for s in ids}, key=str))}
    cols = {lab: j for j, lab in enumerate(sorted({tl[s] for s in ids}, key=str))}
    table = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for s in ids:
        table[rows[pl[s]], cols[tl[s]]] += 1
    return table


def clustering_accuracy(predicted, truth) -> float:
    """Fraction of stories correct under the best one-to-one label mapping."""
    table = contingency(predicted, truth)
    if table.size == 0:
        raise InvalidInputError("empty partitions")
    r, c = linear_sum_assignment(table, maximize=True)
    return int(table[r, c].sum()) / int(table.sum())


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return float(-math.fsum(p * np.log(p)))


def nmi(predicted, truth) -> float:
    """Mutual information normalized by the geometric mean of the two entropies."""
    table = contingency(predicted, truth)
    n = int(table.sum())
    if n == 0:
        raise InvalidInputError("empty partitions")
    h_pred = _entropy(table.sum(axis=1), n)
    h_true = _entropy(table.sum(axis=0), n)
    if h_pred == 0 and h_true == 0:
        return 1.0
    if h_pred == 0 or h_true == 0:
        return 0.0
    rows, cols = table.sum(axis=1), table.sum(axis=0)
    terms = []
    for i, j in zip(*np.nonzero(table)):
        nij = table[i, j]
        terms.append(nij / n * math.log(n * nij / (rows[i] * cols[j])))
    mi = max(math.fsum(terms), 0.0)
    return min(mi / math.sqrt(h_pred * h_true), 1.0)
