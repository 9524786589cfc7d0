"""Linking per-window topics into trajectories."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .graph import kl, smoothed
from .model import COMPONENTS, HyperParams, InvalidInputError, TopicParams


@dataclass(frozen=True)
class TopicNode:
    window: int
    label: object
    params: TopicParams
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise InvalidInputError("topic node size must be >= 1")

    @property
    def key(self) -> tuple:
        return (self.window, self.label)


@dataclass
class Trajectory:
    nodes: list
    links: list = field(default_factory=list)  # (node_index_a, node_index_b, similarity)
    chains: dict = field(default_factory=dict)  # name -> sorted node indices


def _component_kl(a: dict, b: dict, eps: float) -> float:
    vocab = sorted(set(a) | set(b))
    if not vocab:
        return 0.0
    return kl(smoothed(a, vocab, eps), smoothed(b, vocab, eps))


def topic_kl(a: TopicParams, b: TopicParams, lambda_track: Sequence[float], eps: float = 1e-6) -> float:
    """Weighted sum of per-component KL(a_j || b_j) over word-frequency histograms."""
    if len(lambda_track) != 5:
        raise InvalidInputError("lambda_track needs 5 weights")
    terms = []
    for lam, c in zip(lambda_track, COMPONENTS):
        if lam:
            terms.append(lam * _component_kl(a.word_freq.get(c, {}), b.word_freq.get(c, {}), eps))
    return math.fsum(terms)


def topic_similarity(a: TopicNode, b: TopicNode, hyper: HyperParams) -> float:
    if a.window == b.window:
        raise InvalidInputError("topics in the same window cannot be linked")
    eps = hyper.smoothing_eps
    div = topic_kl(a.params, b.params, hyper.lambda_track, eps) + topic_kl(b.params, a.params, hyper.lambda_track, eps)
    content = hyper.alpha_sim * math.exp(-hyper.beta_kl * div)
    timing = (1.0 - hyper.alpha_sim) * math.exp(-abs(a.window - b.window))
    return content + timing


def build_trajectories(windows: Sequence[Sequence[TopicNode]], hyper: HyperParams) -> Trajectory:
    """Link every cross-window topic pair whose similarity reaches ``tau_link``.

    Trajectories are the connected components of the link graph, named
    ``traj-0``, ``traj-1``, ... in order of their earliest node.
    """
    nodes = [node for window in windows for node in window]
    seen = [w[0].window for w in windows if w]
    if seen != sorted(seen):
        raise InvalidInputError("windows must be ordered by time index")
    links = []
    for i, a in enumerate(nodes):
        for j in range(i + 1, len(nodes)):
            b = nodes[j]
            if a.window == b.window:
                continue
            if hyper.max_gap is not None and abs(a.window - b.window) > hyper.max_gap:
                continue
            sim = topic_similarity(a, b, hyper)
            if sim >= hyper.tau_link:
                links.append((i, j, sim) if a.window < b.window else (j, i, sim))
    parent = list(range(len(nodes)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j, _ in links:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    groups: dict = {}
    for i in range(len(nodes)):
        groups.setdefault(find(i), []).append(i)
    chains = {f"traj-{n}": members for n, members in enumerate(sorted(groups.values(), key=min))}
    return Trajectory(nodes, links, chains)
