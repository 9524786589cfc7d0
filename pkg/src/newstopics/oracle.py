"""Exhaustive MAP partition search for tiny corpora."""
from __future__ import annotations

from typing import Iterator, Sequence

from .estimation import ClusterScorer, Partition
from .model import HyperParams, InvalidInputError, Story

MAX_ORACLE_N = 10


def set_partitions(n: int) -> Iterator[list]:
    """Restricted-growth strings of length ``n`` in lexicographic order.

    Each string ``a`` has ``a[0] == 0`` and ``a[i] <= max(a[:i]) + 1``; there are
    Bell(n) of them.
    """
    if n == 0:
        yield []
        return
    a = [0] * n
    m = [0] * n  # m[i] = max(a[:i+1])
    while True:
        yield list(a)
        i = n - 1
        while i > 0 and a[i] == m[i - 1] + 1:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        m[i] = max(m[i - 1], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            m[j] = m[i]


def _clusters(rgs: list) -> list:
    groups: dict = {}
    for i, lab in enumerate(rgs):
        groups.setdefault(lab, []).append(i)
    return [frozenset(g) for g in groups.values()]


def exact_map(corpus: Sequence[Story], hyper: HyperParams, limit: int = MAX_ORACLE_N):
    """Best partition and its log-posterior by enumerating every set partition.

    Ties go to the partition with fewer clusters, then to the lexicographically
    smaller restricted-growth string.
    """
    n = len(corpus)
    if n == 0:
        raise InvalidInputError("empty corpus")
    if n > limit:
        raise InvalidInputError(f"oracle refuses N={n} > {limit}")
    scorer = ClusterScorer(corpus, hyper)
    best_rgs, best_score, best_k = None, None, None
    for rgs in set_partitions(n):
        score = scorer.total(_clusters(rgs))
        k = max(rgs) + 1
        if best_score is None or score > best_score or (score == best_score and k < best_k):
            best_rgs, best_score, best_k = rgs, score, k
    return Partition.from_assignment(corpus, best_rgs, hyper), best_score


def all_partition_scores(corpus: Sequence[Story], hyper: HyperParams) -> list:
    """``(rgs, log_posterior)`` for every set partition of a tiny corpus."""
    if len(corpus) > MAX_ORACLE_N:
        raise InvalidInputError(f"oracle refuses N={len(corpus)} > {MAX_ORACLE_N}")
    scorer = ClusterScorer(corpus, hyper)
    return [(tuple(rgs), scorer.total(_clusters(rgs))) for rgs in set_partitions(len(corpus))]
