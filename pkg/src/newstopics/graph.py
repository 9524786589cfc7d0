"""Story adjacency graph with symmetric-KL edge distances and threshold pruning."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .model import COMPONENTS, HyperParams, InvalidInputError, Story


@dataclass(frozen=True)
class AdjacencyGraph:
    """Pruned story graph.

    ``vertices`` are story ids in corpus order; ``edges`` are ``(i, j, distance)``
    with integer vertex positions ``i < j``.
    """

    vertices: tuple
    edges: tuple

    def neighbors(self) -> list:
        adj = [[] for _ in self.vertices]
        for i, j, d in self.edges:
            adj[i].append((j, d))
            adj[j].append((i, d))
        return adj


def smoothed(counts: Mapping[str, float], vocab: Iterable[str], eps: float) -> dict:
    """Relative frequencies of ``counts`` over ``vocab`` with additive ``eps`` smoothing.

    Counts are normalized before smoothing, so scaling every count by the same
    factor leaves the result unchanged.  An all-zero map gives the uniform
    distribution.
    """
    vocab = list(vocab)
    if not vocab:
        raise InvalidInputError("empty vocabulary")
    if not eps > 0:
        raise InvalidInputError("eps must be > 0")
    total = math.fsum(counts.get(w, 0.0) for w in vocab)
    z = 1.0 + eps * len(vocab) if total > 0 else eps * len(vocab)
    scale = 1.0 / total if total > 0 else 0.0
    return {w: (counts.get(w, 0.0) * scale + eps) / z for w in vocab}


def component_histogram(story: Story, c: str, eps: float, vocab: Iterable[str]) -> dict:
    return smoothed(Counter(story.words(c)), vocab, eps)


def kl(p: Mapping[str, float], q: Mapping[str, float]) -> float:
    """KL(p || q) for distributions sharing a support."""
    return math.fsum(pw * math.log(pw / q[w]) for w, pw in p.items() if pw > 0)


def sym_kl(a: Mapping[str, float], b: Mapping[str, float], eps: float) -> float:
    """KL(pa||pb) + KL(pb||pa) after smoothing counts on their union vocabulary.

    Returns 0 when both count maps are empty.
    """
    vocab = sorted(set(a) | set(b))
    if not vocab:
        return 0.0
    pa, pb = smoothed(a, vocab, eps), smoothed(b, vocab, eps)
    return kl(pa, pb) + kl(pb, pa)


def _component_counts(story: Story) -> dict:
    return {c: Counter(story.words(c)) for c in COMPONENTS}


def _distance_from_counts(ca: dict, cb: dict, hyper: HyperParams) -> float:
    terms = []
    for lam, c in zip(hyper.lambda_edge, COMPONENTS):
        if lam == 0:
            continue
        terms.append(lam * sym_kl(ca[c], cb[c], hyper.smoothing_eps) / 2.0)
    return math.fsum(terms)


def edge_distance(a: Story, b: Story, hyper: HyperParams) -> float:
    return _distance_from_counts(_component_counts(a), _component_counts(b), hyper)


def build_graph(corpus: Sequence[Story], hyper: HyperParams) -> AdjacencyGraph:
    """Complete story graph minus every edge with distance >= ``hyper.tau_prune``."""
    if not corpus:
        raise InvalidInputError("empty corpus")
    counts = [_component_counts(s) for s in corpus]
    edges = []
    n = len(corpus)
    for i in range(n):
        for j in range(i + 1, n):
            d = _distance_from_counts(counts[i], counts[j], hyper)
            if d < hyper.tau_prune:
                edges.append((i, j, d))
    return AdjacencyGraph(tuple(s.id for s in corpus), tuple(edges))
