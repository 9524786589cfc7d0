"""Swendsen-Wang Cuts sampling over story partitions.

Each sweep turns on same-label edges with probability exp(-D/T), picks one
connected component of the on-edges uniformly at random and relabels it in a
single Gibbs-like draw over all existing clusters plus a fresh one.  Because
the draw is weighted by the cut product and the posterior of the resulting
partition, the move is accepted with probability 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .estimation import ClusterScorer, Partition, k_log_prior
from .graph import AdjacencyGraph, build_graph
from .model import HyperParams, InvalidInputError, Story
from .rng import substream


@dataclass(frozen=True)
class CoolingSchedule:
    T0: float = 10.0
    rho: float = 0.97
    sweeps: int = 500
    T_min: float = 0.2

    def __post_init__(self):
        if not (self.T0 > 0 and 0 < self.rho < 1 and self.T_min > 0 and self.sweeps >= 0):
            raise ValueError(f"invalid cooling schedule {self}")

    def temperature(self, n: int) -> float:
        return max(self.T0 * self.rho**n, self.T_min)

    @classmethod
    def from_hyper(cls, hyper: HyperParams) -> "CoolingSchedule":
        return cls(hyper.T0, hyper.rho, hyper.sweeps, hyper.T_min)


@dataclass
class SwcState:
    partition: Partition
    temperature: float
    rng: np.random.Generator
    sweep: int = 0


@dataclass
class ScoreTrace:
    current: list = field(default_factory=list)
    best: list = field(default_factory=list)
    temperature: list = field(default_factory=list)


def turn_on_prob(distance: float, T: float) -> float:
    if not T > 0:
        raise ValueError("temperature must be positive")
    if distance < 0:
        raise ValueError("distance must be non-negative")
    return math.exp(-distance / T)


def _edge_arrays(graph: AdjacencyGraph):
    if graph.edges:
        e = np.array([(i, j) for i, j, _ in graph.edges], dtype=np.int64)
        d = np.array([dist for _, _, dist in graph.edges], dtype=float)
        return e[:, 0], e[:, 1], d
    empty = np.zeros(0, dtype=np.int64)
    return empty, empty, np.zeros(0)


def _on_mask(ei, ej, dist, labels: np.ndarray, T: float, rng: np.random.Generator) -> np.ndarray:
    same = labels[ei] == labels[ej]
    q = np.exp(-dist / T)
    return same & (rng.random(len(dist)) < q)


def sample_edge_states(graph: AdjacencyGraph, labels: Sequence[int], T: float, rng: np.random.Generator) -> dict:
    """On/off state for every edge of E(pi), keyed by ``(i, j)``.

    ``labels`` are per-vertex labels in graph vertex order.  Edges joining
    different labels are off by definition and are omitted.
    """
    if not T > 0:
        raise ValueError("temperature must be positive")
    ei, ej, dist = _edge_arrays(graph)
    labels = np.asarray(labels)
    on = _on_mask(ei, ej, dist, labels, T, rng)
    same = labels[ei] == labels[ej]
    return {(int(i), int(j)): bool(o) for i, j, o, s in zip(ei, ej, on, same) if s}


def connected_components(vertices, on_edges) -> list:
    """Connected components as a list of sets, ordered by smallest member.

    ``vertices`` is an int count or an iterable of vertex ids.
    """
    verts = list(range(vertices)) if isinstance(vertices, (int, np.integer)) else list(vertices)
    parent = {v: v for v in verts}

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for a, b in on_edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
    groups: dict = {}
    for v in verts:
        groups.setdefault(find(v), set()).add(v)
    return sorted(groups.values(), key=lambda g: min(g))


class SwcChain:
    """One SWC chain over a fixed corpus and pruned graph."""

    def __init__(self, corpus: Sequence[Story], hyper: HyperParams, graph: AdjacencyGraph | None = None,
                 scorer: ClusterScorer | None = None):
        if not corpus:
            raise InvalidInputError("empty corpus")
        self.corpus = list(corpus)
        self.hyper = hyper
        self.n = len(self.corpus)
        self.graph = graph if graph is not None else build_graph(self.corpus, hyper)
        self.scorer = scorer if scorer is not None else ClusterScorer(self.corpus, hyper)
        self._ei, self._ej, self._dist = _edge_arrays(self.graph)
        self._adj = self.graph.neighbors()
        self.labels = np.zeros(self.n, dtype=np.int64)
        self.clusters: dict = {0: frozenset(range(self.n))}
        self._next_label = 1

    # -- state ---------------------------------------------------------------

    def set_labels(self, labels: Sequence[int]) -> None:
        self.labels = np.asarray(labels, dtype=np.int64).copy()
        clusters: dict = {}
        for i, lab in enumerate(self.labels.tolist()):
            clusters.setdefault(lab, set()).add(i)
        self.clusters = {lab: frozenset(m) for lab, m in clusters.items()}
        self._next_label = max(self.clusters) + 1

    def log_posterior(self) -> float:
        return self.scorer.total(self.clusters.values())

    def partition(self) -> Partition:
        return Partition.from_assignment(self.corpus, self.labels.tolist(), self.hyper)

    # -- moves ---------------------------------------------------------------

    def components(self, T: float, rng: np.random.Generator) -> list:
        on = _on_mask(self._ei, self._ej, self._dist, self.labels, T, rng)
        pairs = zip(self._ei[on].tolist(), self._ej[on].tolist())
        return connected_components(self.n, pairs)

    def _cut_log_gamma(self, V0: frozenset, T: float) -> dict:
        out: dict = {}
        for v in V0:
            for u, d in self._adj[v]:
                if u in V0:
                    continue
                lab = int(self.labels[u])
                q = math.exp(-d / T)
                out[lab] = out.get(lab, 0.0) + (math.log1p(-q) if q < 1.0 else -math.inf)
        return out

    def flip_candidates(self, V0: frozenset, T: float) -> list:
        """Relabeling options for ``V0`` as ``(label, log_weight, log_posterior)``.

        Existing clusters come first, ordered by their smallest member so the
        draw does not depend on label names, followed by a fresh label.  When
        ``V0`` is its whole cluster the fresh label would reproduce the current
        partition a second time; it is kept with weight zero (log weight -inf)
        so each reachable partition appears once.
        """
        V0 = frozenset(V0)
        l = int(self.labels[next(iter(V0))])
        rest = self.clusters[l] - V0
        others = {lab: m for lab, m in self.clusters.items() if lab != l}
        log_gamma = self._cut_log_gamma(V0, T)
        sc = self.scorer
        other_scores = {lab: sc.score(m) for lab, m in others.items()}
        base = [other_scores[lab] for lab in sorted(others)]
        rest_score = [sc.score(rest)] if rest else []
        k_rest = len(others) + (1 if rest else 0)
        current = self._total(base + [sc.score(self.clusters[l])], len(others) + 1)
        out = []
        for lab in sorted(self.clusters, key=lambda x: min(self.clusters[x])):
            if lab == l:
                logp = current
            else:
                merged = sc.score_union(others[lab], V0)
                parts = [other_scores[o] for o in sorted(others) if o != lab] + [merged] + rest_score
                logp = self._total(parts, k_rest)
            out.append((lab, log_gamma.get(lab, 0.0), logp))
        if rest:
            out.append((self._next_label, 0.0, self._total(base + rest_score + [sc.score(V0)], k_rest + 1)))
        else:
            out.append((self._next_label, -math.inf, current))
        return [(lab, lg + (lp / T if self.hyper.annealed_target else lp), lp) for lab, lg, lp in out]

    def _total(self, cluster_scores: list, k: int) -> float:
        return math.fsum(cluster_scores + [k_log_prior(k, self.n, self.hyper)])

    def flip_probabilities(self, V0: frozenset, T: float) -> list:
        """``(label, probability)`` for each candidate, normalized in log domain."""
        cands = self.flip_candidates(V0, T)
        w = np.array([c[1] for c in cands])
        top = np.max(w)
        p = np.exp(w - top)
        p /= p.sum()
        return [(c[0], float(pi)) for c, pi in zip(cands, p)]

    def apply(self, V0: frozenset, label: int) -> None:
        V0 = frozenset(V0)
        l = int(self.labels[next(iter(V0))])
        if label == l:
            return
        rest = self.clusters[l] - V0
        if rest:
            self.clusters[l] = rest
        else:
            del self.clusters[l]
        self.clusters[label] = self.clusters.get(label, frozenset()) | V0
        for v in V0:
            self.labels[v] = label
        if label >= self._next_label:
            self._next_label = label + 1

    def flip(self, V0: frozenset, T: float, rng: np.random.Generator) -> int:
        probs = self.flip_probabilities(V0, T)
        r = rng.random()
        acc = 0.0
        choice = probs[-1][0]
        for lab, p in probs:
            acc += p
            if r < acc and p > 0:
                choice = lab
                break
        self.apply(V0, choice)
        return choice

    def sweep(self, T: float, rng: np.random.Generator) -> None:
        comps = self.components(T, rng)
        V0 = frozenset(comps[int(rng.integers(len(comps)))])
        self.flip(V0, T, rng)


def flip_component(V0, state: SwcState, graph: AdjacencyGraph, corpus: Sequence[Story], hyper: HyperParams,
                   rng: np.random.Generator) -> SwcState:
    """Relabel component ``V0`` (vertex positions) of ``state`` and return the new state."""
    chain = SwcChain(corpus, hyper, graph)
    chain.set_labels([state.partition.labels[s.id] for s in corpus])
    chain.flip(frozenset(V0), state.temperature, rng)
    return SwcState(chain.partition(), state.temperature, rng, state.sweep)


def _initial_labels(n: int, hyper: HyperParams, rng: np.random.Generator) -> list:
    if hyper.init == "random":
        k0 = max(1, int(round(math.sqrt(n))))
        return rng.integers(0, k0, size=n).tolist()
    return [0] * n


def _run_chain(corpus, hyper, schedule, rng, graph, scorer):
    chain = SwcChain(corpus, hyper, graph, scorer)
    chain.set_labels(_initial_labels(len(corpus), hyper, rng))
    best_score = chain.log_posterior()
    best_labels = chain.labels.copy()
    trace = ScoreTrace()
    for n in range(schedule.sweeps):
        T = schedule.temperature(n)
        chain.sweep(T, rng)
        cur = chain.log_posterior()
        if cur > best_score:
            best_score, best_labels = cur, chain.labels.copy()
        trace.current.append(cur)
        trace.best.append(best_score)
        trace.temperature.append(T)
    return best_labels, best_score, trace


def run_swc(corpus: Sequence[Story], hyper: HyperParams, schedule: CoolingSchedule | None = None,
            seed: int = 0, graph: AdjacencyGraph | None = None):
    """Anneal SWC chains and return ``(best partition, score trace)``.

    With ``hyper.n_chains > 1`` the chains run on substreams ``chain-0``,
    ``chain-1``, ... and the chain with the best score wins; its trace is
    returned.
    """
    if not corpus:
        raise InvalidInputError("empty corpus")
    schedule = schedule or CoolingSchedule.from_hyper(hyper)
    graph = graph if graph is not None else build_graph(corpus, hyper)
    scorer = ClusterScorer(corpus, hyper)
    best = None
    for c in range(hyper.n_chains):
        result = _run_chain(corpus, hyper, schedule, substream(seed, f"chain-{c}"), graph, scorer)
        if best is None or result[1] > best[1]:
            best = result
    labels, _, trace = best
    return Partition.from_assignment(corpus, labels.tolist(), hyper), trace
