import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newstopics.estimation import (
    ClusterScorer,
    ClusterStats,
    Partition,
    fit_topic,
    gauss_fit,
    log_posterior,
)
from newstopics.model import COMPONENTS, HyperParams, InvalidInputError, Story, score_topic

from helpers import random_story, rel_close
from reference import naive_fit, naive_log_posterior, naive_partitions


def test_fit_single_story_counts(hyper):
    t = fit_topic([Story("a", who=["a", "a", "b"])], hyper)
    assert t.word_freq["who"] == {"a": pytest.approx(2 / 3), "b": pytest.approx(1 / 3)}
    assert t.word_freq["face"] == {}
    assert t.branch_freq == 1


def test_fit_identical_stories_floor_sigma(hyper):
    s = Story("a", who=["x", "y"], where=["z"], what=["w"], face=["f"])
    t = fit_topic([s, Story("b", **{c: s.words(c) for c in COMPONENTS})], hyper)
    assert all(sigma == hyper.sigma_floor for _, sigma in t.ratio_gauss.values())


def test_fit_missing_ratio_defaults(hyper):
    t = fit_topic([Story("a", who=["x"])], hyper)
    assert t.ratio_gauss["wo/wr"] == (1.0, hyper.sigma_floor)
    assert t.ratio_gauss["text/img"] == (1.0, hyper.sigma_floor)


def test_fit_matches_counting_oracle(hyper):
    rng = random.Random(5)
    stories = [random_story(rng, f"s{i}") for i in range(5)]
    t = fit_topic(stories, hyper)
    wf, pf, rg = naive_fit(stories, hyper.sigma_floor)
    for c in COMPONENTS:
        assert t.word_freq[c].keys() == wf[c].keys()
        for w in wf[c]:
            assert t.word_freq[c][w] == pytest.approx(wf[c][w], abs=1e-15)
    for p in pf:
        assert t.pair_freq[p] == pytest.approx(pf[p], abs=1e-15)
    for r in rg:
        assert t.ratio_gauss[r] == pytest.approx(rg[r], abs=1e-12)


def test_fit_empty_raises(hyper):
    with pytest.raises(InvalidInputError):
        fit_topic([], hyper)


def test_gauss_fit_cases():
    assert gauss_fit([], 0.1) == (1.0, 0.1)
    assert gauss_fit([2.5], 0.1) == (2.5, 0.1)
    mean, sd = gauss_fit([1.0, 2.0, 3.0], 0.1)
    assert mean == 2.0 and sd == pytest.approx(1.0)


def test_one_story_posterior(hyper):
    s = Story("a", who=["x", "y"], what=["w"], face=["f"], tt_pairs=[("x", "w")])
    p = Partition.from_labels([s], {"a": 0}, hyper)
    expected = score_topic(s, p.topics[0], hyper) - hyper.alpha * 1 * 1
    assert log_posterior(p, [s], hyper) == pytest.approx(expected, abs=1e-12)


def test_closed_form_equals_per_story_sum(hyper):
    rng = random.Random(9)
    for trial in range(30):
        stories = [random_story(rng, f"s{i}") for i in range(rng.randint(1, 7))]
        topic = fit_topic(stories, hyper)
        direct = math.fsum(score_topic(s, topic, hyper) for s in stories)
        assert rel_close(ClusterStats.of_stories(stories).log_score(hyper), direct)


def test_split_into_identical_halves_prior_difference():
    hyper = HyperParams(alpha=0.37)
    s = [Story(f"s{i}", who=["a", "b"], what=["c"]) for i in range(4)]
    one = log_posterior(Partition.from_labels(s, {x.id: 0 for x in s}, hyper), s, hyper)
    halves = {"s0": 0, "s1": 0, "s2": 1, "s3": 1}
    two = log_posterior(Partition.from_labels(s, halves, hyper), s, hyper)
    # identical halves: likelihood terms differ only through the Zipf size prior
    zipf_shift = 4 * (-1.75 * math.log(2)) - 4 * (-1.75 * math.log(4))
    assert two - one == pytest.approx(-hyper.alpha * 4 + zipf_shift, abs=1e-10)


def test_posterior_k_penalty_exact(hyper):
    rng = random.Random(2)
    stories = [random_story(rng, f"s{i}") for i in range(6)]
    labels = {s.id: i % 3 for i, s in enumerate(stories)}
    base = log_posterior(Partition.from_labels(stories, labels, hyper), stories, hyper)
    heavier = HyperParams(alpha=hyper.alpha + 1.0)
    assert log_posterior(Partition.from_labels(stories, labels, heavier), stories, heavier) == pytest.approx(
        base - 1.0 * 6 * 3, abs=1e-9)


def test_fixed_k_prior(hyper):
    rng = random.Random(4)
    stories = [random_story(rng, f"s{i}") for i in range(5)]
    labels = {s.id: i % 2 for i, s in enumerate(stories)}
    fk = HyperParams(fixed_k=(10, 0.5))
    diff = log_posterior(Partition.from_labels(stories, labels, fk), stories, fk) - log_posterior(
        Partition.from_labels(stories, labels, hyper), stories, hyper)
    assert diff == pytest.approx(-((2 - 10) ** 2) / 1.0 - 0.5 * math.log(math.pi), abs=1e-9)


def test_n4_ranking_matches_enumeration_oracle(hyper):
    rng = random.Random(21)
    stories = [random_story(rng, f"s{i}") for i in range(4)]
    parts = list(naive_partitions([s.id for s in stories]))
    assert len(parts) == 15
    mine, ref = [], []
    for part in parts:
        labels = {sid: k for k, block in enumerate(part) for sid in block}
        mine.append(log_posterior(Partition.from_labels(stories, labels, hyper), stories, hyper))
        ref.append(naive_log_posterior(stories, labels, hyper))
    for a, b in zip(mine, ref):
        assert rel_close(a, b)
    assert sorted(range(15), key=lambda i: mine[i]) == sorted(range(15), key=lambda i: ref[i])


@settings(max_examples=30, deadline=None)
@given(st.permutations(list(range(4))), st.integers(0, 10**6))
def test_relabel_invariance(perm, seed):
    hyper = HyperParams()
    rng = random.Random(seed)
    stories = [random_story(rng, f"s{i}") for i in range(6)]
    labels = {s.id: rng.randrange(4) for s in stories}
    permuted = {k: perm[v] for k, v in labels.items()}
    a = log_posterior(Partition(labels), stories, hyper)
    b = log_posterior(Partition(permuted), stories, hyper)
    assert a == b


def test_posterior_cover_errors(hyper):
    s = [Story("a"), Story("b")]
    with pytest.raises(InvalidInputError):
        log_posterior(Partition({"a": 0}), s, hyper)
    with pytest.raises(InvalidInputError):
        log_posterior(Partition({"a": 0, "b": 0, "c": 1}), s, hyper)


def test_partition_invariants(hyper):
    rng = random.Random(1)
    stories = [random_story(rng, f"s{i}") for i in range(7)]
    p = Partition.from_labels(stories, {s.id: "xyz"[i % 3] for i, s in enumerate(stories)}, hyper)
    assert p.k == 3 == len(p.topics)
    for lab, members in p.groups().items():
        assert p.topics[lab].branch_freq == len(members)
    assert list(p.labels.values())[:3] == [0, 1, 2]


def test_scorer_matches_log_posterior(hyper):
    rng = random.Random(8)
    stories = [random_story(rng, f"s{i}") for i in range(8)]
    scorer = ClusterScorer(stories, hyper)
    for _ in range(20):
        assign = [rng.randrange(3) for _ in stories]
        clusters = {}
        for i, a in enumerate(assign):
            clusters.setdefault(a, set()).add(i)
        total = scorer.total(frozenset(c) for c in clusters.values())
        p = Partition.from_assignment(stories, assign, hyper)
        assert total == log_posterior(p, stories, hyper)
        base, extra = frozenset([0, 1, 2]), frozenset([5, 6])
        assert scorer.score_union(base, extra) == scorer.score(base | extra)


def test_fit_idempotent(hyper):
    rng = random.Random(6)
    stories = [random_story(rng, f"s{i}") for i in range(5)]
    assert fit_topic(stories, hyper) == fit_topic(stories, hyper)
