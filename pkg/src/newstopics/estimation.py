"""Profile-likelihood topic fitting and the partition log-posterior."""
from __future__ import annotations

import math
from collections import Counter, OrderedDict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .model import (
    COMPONENTS,
    PAIR_TYPES,
    RATIOS,
    HyperParams,
    InvalidInputError,
    Story,
    TopicParams,
    gaussian_log_term,
    zipf_log_prior,
)


@dataclass
class Partition:
    """Assignment of story ids to topic labels with the fitted topic parameters."""

    labels: dict
    topics: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return len(set(self.labels.values()))

    def groups(self) -> dict:
        out: dict = {}
        for sid, lab in self.labels.items():
            out.setdefault(lab, []).append(sid)
        return out

    def same_topic(self, a: str, b: str) -> bool:
        return self.labels[a] == self.labels[b]

    @classmethod
    def from_labels(cls, corpus: Sequence[Story], labels: Mapping, hyper: HyperParams) -> "Partition":
        """Build a partition over ``corpus``, relabel canonically and fit topics."""
        _check_cover(corpus, labels)
        canon: dict = {}
        new_labels = {}
        for s in corpus:
            new_labels[s.id] = canon.setdefault(labels[s.id], len(canon))
        members: dict = {}
        for s in corpus:
            members.setdefault(new_labels[s.id], []).append(s)
        topics = {lab: fit_topic(group, hyper) for lab, group in members.items()}
        return cls(new_labels, topics)

    @classmethod
    def from_assignment(cls, corpus: Sequence[Story], assignment: Sequence[int], hyper: HyperParams) -> "Partition":
        return cls.from_labels(corpus, {s.id: int(a) for s, a in zip(corpus, assignment)}, hyper)


def _check_cover(corpus: Sequence[Story], labels: Mapping) -> None:
    ids = [s.id for s in corpus]
    if len(set(ids)) != len(ids):
        raise InvalidInputError("duplicate story ids in corpus")
    if set(ids) != set(labels):
        missing = sorted(set(ids) - set(labels))[:5]
        extra = sorted(set(labels) - set(ids))[:5]
        raise InvalidInputError(f"partition does not cover corpus (missing={missing}, extra={extra})")


def gauss_fit(values: Sequence[float], sigma_floor: float) -> tuple:
    """Sample mean and floored sample standard deviation."""
    n = len(values)
    if n == 0:
        return (1.0, sigma_floor)
    mean = math.fsum(values) / n
    if n == 1:
        return (mean, sigma_floor)
    var = math.fsum((x - mean) ** 2 for x in values) / (n - 1)
    return (mean, max(math.sqrt(var), sigma_floor))


class ClusterStats:
    """Sufficient statistics of a story set: token counters and ratio samples."""

    __slots__ = ("words", "pairs", "ratios", "n")

    def __init__(self, words=None, pairs=None, ratios=None, n=0):
        self.words = words or {c: Counter() for c in COMPONENTS}
        self.pairs = pairs or {p: Counter() for p in PAIR_TYPES}
        self.ratios = ratios or {r: [] for r in RATIOS}
        self.n = n

    @classmethod
    def of_story(cls, story: Story) -> "ClusterStats":
        ratios = {}
        for r in RATIOS:
            x = story.ratio(r)
            ratios[r] = [] if x is None else [x]
        return cls(
            {c: Counter(story.words(c)) for c in COMPONENTS},
            {p: Counter(story.pairs(p)) for p in PAIR_TYPES},
            ratios,
            1,
        )

    @classmethod
    def of_stories(cls, stories: Iterable[Story]) -> "ClusterStats":
        acc = cls()
        for s in stories:
            acc.add(cls.of_story(s))
        return acc

    def copy(self) -> "ClusterStats":
        return ClusterStats(
            {c: Counter(v) for c, v in self.words.items()},
            {p: Counter(v) for p, v in self.pairs.items()},
            {r: list(v) for r, v in self.ratios.items()},
            self.n,
        )

    def add(self, other: "ClusterStats") -> "ClusterStats":
        for c in COMPONENTS:
            self.words[c].update(other.words[c])
        for p in PAIR_TYPES:
            self.pairs[p].update(other.pairs[p])
        for r in RATIOS:
            self.ratios[r].extend(other.ratios[r])
        self.n += other.n
        return self

    def topic(self, hyper: HyperParams) -> TopicParams:
        if self.n == 0:
            raise InvalidInputError("cannot fit a topic to an empty story set")
        return TopicParams(
            word_freq={c: _relative(self.words[c]) for c in COMPONENTS},
            pair_freq={p: _relative(self.pairs[p]) for p in PAIR_TYPES},
            ratio_gauss={r: gauss_fit(self.ratios[r], hyper.sigma_floor) for r in RATIOS},
            branch_freq=self.n,
        )

    def log_score(self, hyper: HyperParams) -> float:
        """Sum of every member's topic score under the topic fitted to the members.

        Token terms collapse to sum_w C_w log(1 + C_w / M) over the pooled counts,
        so no per-story pass is needed for them.
        """
        if self.n == 0:
            raise InvalidInputError("cannot score an empty story set")
        terms = []
        for counter in list(self.words.values()) + list(self.pairs.values()):
            total = sum(counter.values())
            if total:
                terms.extend(cnt * math.log1p(cnt / total) for cnt in counter.values())
        for r in RATIOS:
            xs = self.ratios[r]
            if xs:
                mu, sigma = gauss_fit(xs, hyper.sigma_floor)
                terms.extend(gaussian_log_term(x, mu, sigma) for x in xs)
        terms.append(self.n * zipf_log_prior(self.n, hyper.zipf_s))
        return math.fsum(terms)


def _relative(counter: Counter) -> dict:
    total = sum(counter.values())
    if not total:
        return {}
    return {k: v / total for k, v in counter.items()}


def fit_topic(stories: Sequence[Story], hyper: HyperParams) -> TopicParams:
    """Fit topic parameters to ``stories`` by per-component relative counts."""
    if not stories:
        raise InvalidInputError("fit_topic needs at least one story")
    return ClusterStats.of_stories(stories).topic(hyper)


def k_log_prior(k: int, n: int, hyper: HyperParams) -> float:
    """Partition-count prior: -alpha*N*K plus the optional Gaussian term on K."""
    out = -hyper.alpha * n * k
    if hyper.fixed_k is not None:
        mu, var = hyper.fixed_k
        out += -0.5 * (k - mu) ** 2 / var - 0.5 * math.log(2.0 * math.pi * var)
    return out


def log_posterior(partition: Partition, corpus: Sequence[Story], hyper: HyperParams) -> float:
    """Unnormalized log p(W | D) with topics refit from the partition."""
    _check_cover(corpus, partition.labels)
    members: dict = {}
    for s in corpus:
        members.setdefault(partition.labels[s.id], []).append(s)
    scores = [ClusterStats.of_stories(group).log_score(hyper) for group in members.values()]
    scores.append(k_log_prior(len(members), len(corpus), hyper))
    return math.fsum(scores)


class ClusterScorer:
    """Memoized cluster scores over a fixed corpus, keyed by member index sets.

    Used by the sampler and the oracle; values equal ``log_posterior`` pieces.
    """

    def __init__(self, corpus: Sequence[Story], hyper: HyperParams, cache_size: int = 200_000):
        self.corpus = list(corpus)
        self.hyper = hyper
        self.n = len(self.corpus)
        self._story_stats = [ClusterStats.of_story(s) for s in self.corpus]
        self._scores: OrderedDict = OrderedDict()
        self._stats: OrderedDict = OrderedDict()
        self._cache_size = cache_size

    def _remember(self, cache: OrderedDict, key, value, limit):
        cache[key] = value
        if len(cache) > limit:
            cache.popitem(last=False)

    def stats(self, members: frozenset) -> ClusterStats:
        hit = self._stats.get(members)
        if hit is not None:
            self._stats.move_to_end(members)
            return hit
        acc = ClusterStats()
        for i in sorted(members):
            acc.add(self._story_stats[i])
        self._remember(self._stats, members, acc, self._cache_size // 10)
        return acc

    def score(self, members: frozenset) -> float:
        hit = self._scores.get(members)
        if hit is not None:
            return hit
        value = self.stats(members).log_score(self.hyper)
        self._remember(self._scores, members, value, self._cache_size)
        return value

    def score_union(self, base: frozenset, extra: frozenset) -> float:
        """Score of ``base | extra`` built from the cached stats of ``base``."""
        key = base | extra
        hit = self._scores.get(key)
        if hit is not None:
            return hit
        if not base:
            return self.score(extra)
        acc = self.stats(base).copy()
        for i in sorted(extra):
            acc.add(self._story_stats[i])
        value = acc.log_score(self.hyper)
        self._remember(self._scores, key, value, self._cache_size)
        return value

    def total(self, clusters: Iterable[frozenset]) -> float:
        clusters = list(clusters)
        parts = [self.score(c) for c in clusters]
        parts.append(k_log_prior(len(clusters), self.n, self.hyper))
        return math.fsum(parts)

    def topic(self, members: frozenset) -> TopicParams:
        return self.stats(members).topic(self.hyper)
