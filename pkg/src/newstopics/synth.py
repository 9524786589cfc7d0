"""Synthetic multimodal corpora with planted topics.

Topic sizes follow a Zipf law, per-story entity-count ratios follow per-topic
Gaussians and words come from per-topic Dirichlet-categorical distributions
mixed with uniform background noise.  The module also carries the two
goodness-of-fit checks used to confirm those assumptions on generated data.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize, stats
from scipy.special import zeta

from .estimation import Partition
from .model import COMPONENTS, RATIOS, HyperParams, InvalidInputError, Story
from .rng import substream


def _default_vocab():
    return {"who": 40, "where": 20, "what": 80, "face": 20, "obj": 30}


@dataclass(frozen=True)
class SynthConfig:
    n_topics: int = 10
    n_stories: int | None = 200
    zipf_s: float = 1.75
    vocab: dict = field(default_factory=_default_vocab)
    concentration: float = 0.1
    what_count: float = 20.0
    # per-topic ratio means are drawn uniformly from these ranges
    wo_wt_range: tuple = (0.3, 1.0)
    wr_wt_range: tuple = (0.2, 0.6)
    text_img_range: tuple = (1.5, 4.0)
    ratio_sigma: float = 0.08
    pair_rate: float = 0.05
    noise_rate: float = 0.0
    windows: int = 1
    persistent_topics: int = 1
    seed: int = 0

    def __post_init__(self):
        vocab = {c: int(self.vocab.get(c, 0)) for c in COMPONENTS}
        object.__setattr__(self, "vocab", vocab)
        for name in ("wo_wt_range", "wr_wt_range", "text_img_range"):
            object.__setattr__(self, name, tuple(float(x) for x in getattr(self, name)))
        problems = []
        if self.n_topics < 1:
            problems.append("n_topics must be >= 1")
        if self.n_stories is not None and self.n_stories < self.n_topics:
            problems.append("n_stories must be >= n_topics")
        if any(v < 1 for v in vocab.values()):
            problems.append("every component vocabulary needs >= 1 word")
        if not self.zipf_s > 1:
            problems.append("zipf_s must be > 1")
        if not self.concentration > 0:
            problems.append("concentration must be > 0")
        if not self.what_count >= 1:
            problems.append("what_count must be >= 1")
        if not self.ratio_sigma >= 0:
            problems.append("ratio_sigma must be >= 0")
        for name in ("pair_rate", "noise_rate"):
            if not 0 <= getattr(self, name) <= 1:
                problems.append(f"{name} must lie in [0, 1]")
        if self.windows < 1 or not 0 <= self.persistent_topics <= self.n_topics:
            problems.append("windows must be >= 1 and 0 <= persistent_topics <= n_topics")
        if problems:
            raise InvalidInputError("; ".join(problems))

    def to_dict(self) -> dict:
        return asdict(self)


# ------------------------------------------------------------------ sizes


def _truncated_zipf_mean(s: float, m: int) -> float:
    k = np.arange(1, m + 1, dtype=float)
    w = k**-s
    return float((k * w).sum() / w.sum())


def _nudged_sizes(n_topics: int, s: float, rng: np.random.Generator, total: int) -> np.ndarray:
    # fallback when rejection is hopeless: truncated Zipf matched in mean, then +/-1 repairs
    cap = total - n_topics + 1
    target = total / n_topics
    m = cap
    if _truncated_zipf_mean(s, cap) > target:
        lo, hi = 1, cap
        while lo < hi:
            mid = (lo + hi) // 2
            if _truncated_zipf_mean(s, mid) < target:
                lo = mid + 1
            else:
                hi = mid
        m = lo
    k = np.arange(1, m + 1)
    p = k**-s
    sizes = rng.choice(k, size=n_topics, p=p / p.sum()).astype(np.int64)
    while sizes.sum() != total:
        if sizes.sum() > total:
            cand = np.flatnonzero(sizes > 1)
            w = sizes[cand].astype(float)
            sizes[cand[rng.choice(len(cand), p=w / w.sum())]] -= 1
        else:
            w = sizes.astype(float)
            sizes[rng.choice(len(sizes), p=w / w.sum())] += 1
    return sizes


def zipf_sizes(n_topics: int, s: float, rng: np.random.Generator, total: int | None = None,
               max_draws: int = 50_000_000) -> list:
    """Topic sizes drawn from a Zipf(s) law.

    With ``total`` set, rows of iid Zipf draws are generated until one sums to
    exactly ``total``, which samples the Zipf law conditioned on the total.
    After ``max_draws`` values without a hit it falls back to a mean-matched
    truncated law with one-story repairs.
    """
    if total is None:
        return [int(x) for x in rng.zipf(s, size=n_topics)]
    if total < n_topics:
        raise InvalidInputError("need at least one story per topic")
    batch = max(1, min(4096, 2_000_000 // n_topics))
    drawn = 0
    while drawn < max_draws:
        rows = rng.zipf(s, size=(batch, n_topics))
        hit = np.flatnonzero(rows.sum(axis=1) == total)
        if len(hit):
            return rows[hit[0]].astype(np.int64).tolist()
        drawn += rows.size
    return _nudged_sizes(n_topics, s, rng, total).tolist()


# ---------------------------------------------------------------- stories


def _pairs_from(rng, left: Sequence[str], right: Sequence[str], rate: float) -> list:
    if not left or not right or rate == 0:
        return []
    mask = rng.random((len(left), len(right))) < rate
    return [(left[i], right[j]) for i, j in zip(*np.nonzero(mask))]


def _draw_words(rng, n, topic_p, vocab_size, noise_rate, prefix):
    if n == 0:
        return []
    idx = rng.choice(vocab_size, size=n, p=topic_p)
    noisy = rng.random(n) < noise_rate
    idx[noisy] = rng.integers(0, vocab_size, size=int(noisy.sum()))
    return [f"{prefix}{i}" for i in idx]


_PREFIX = {"who": "wo", "where": "wr", "what": "wt", "face": "f", "obj": "o"}


def generate(config: SynthConfig, hyper: HyperParams | None = None):
    """Generate ``(stories, ground_truth_partition)``; deterministic in ``config.seed``."""
    hyper = hyper or HyperParams()
    rng = substream(config.seed, "synth")
    sizes = zipf_sizes(config.n_topics, config.zipf_s, rng, config.n_stories)
    topics = []
    for t in range(config.n_topics):
        word_p = {c: rng.dirichlet(np.full(v, config.concentration)) for c, v in config.vocab.items()}
        for c, p in word_p.items():
            # dirichlet draws with tiny concentration can underflow to all-zero mass
            if not np.isfinite(p).all() or p.sum() <= 0:
                p = np.zeros(len(p))
                p[rng.integers(len(p))] = 1.0
            word_p[c] = p / p.sum()
        topics.append(
            {
                "words": word_p,
                "wo_wt": rng.uniform(*config.wo_wt_range),
                "wr_wt": rng.uniform(*config.wr_wt_range),
                "text_img": rng.uniform(*config.text_img_range),
                "face_share": rng.uniform(0.3, 0.7),
                "windows": list(range(config.windows)) if t < config.persistent_topics
                else [t % config.windows],
            }
        )
    assignment = np.repeat(np.arange(config.n_topics), sizes)
    rng.shuffle(assignment)
    stories, labels = [], {}
    sigma = config.ratio_sigma
    for i, t in enumerate(assignment.tolist()):
        tp = topics[t]
        m_what = 1 + int(rng.poisson(config.what_count - 1))
        m_who = max(0, int(round(rng.normal(tp["wo_wt"], sigma) * m_what)))
        m_where = max(0, int(round(rng.normal(tp["wr_wt"], sigma) * m_what)))
        m_text = m_who + m_where + m_what
        r_joint = rng.normal(tp["text_img"], sigma * tp["text_img"])
        m_img = max(0, int(round(m_text / r_joint))) if r_joint > 0 else 0
        m_face = int(rng.binomial(m_img, tp["face_share"]))
        counts = {"who": m_who, "where": m_where, "what": m_what, "face": m_face, "obj": m_img - m_face}
        words = {
            c: _draw_words(rng, counts[c], tp["words"][c], config.vocab[c], config.noise_rate, _PREFIX[c])
            for c in COMPONENTS
        }
        rate = config.pair_rate
        tt = (_pairs_from(rng, words["who"], words["where"], rate)
              + _pairs_from(rng, words["who"], words["what"], rate)
              + _pairs_from(rng, words["where"], words["what"], rate))
        ii = _pairs_from(rng, words["face"], words["obj"], rate)
        joint = ([(a, b, "face-who") for a, b in _pairs_from(rng, words["who"], words["face"], rate)]
                 + [(a, b, "face-what") for a, b in _pairs_from(rng, words["what"], words["face"], rate)]
                 + [(a, b, "obj-what") for a, b in _pairs_from(rng, words["what"], words["obj"], rate)])
        window = tp["windows"][int(rng.integers(len(tp["windows"])))]
        sid = f"s{i:05d}"
        stories.append(Story(sid, window, tt_pairs=tt, ii_pairs=ii, joint_pairs=joint, **words))
        labels[sid] = t
    return stories, Partition.from_labels(stories, labels, hyper)


# ------------------------------------------------------------ diagnostics


def fit_zipf_exponent(sizes: Sequence[int]) -> float:
    """Maximum-likelihood exponent of a discrete power law on {1, 2, ...}."""
    x = np.asarray(sizes, dtype=float)
    if len(x) == 0 or (x < 1).any():
        raise InvalidInputError("sizes must be positive integers")
    mean_log = float(np.log(x).mean())
    nll = lambda s: s * mean_log + math.log(zeta(s, 1))  # noqa: E731
    res = optimize.minimize_scalar(nll, bounds=(1.0001, 6.0), method="bounded")
    return float(res.x)


def _zipf_ks(x: np.ndarray, s: float) -> float:
    # the empirical CDF is flat between observed values, so the sup is reached at
    # an observed value u or just before it (u - 1); the model CDF uses Hurwitz zeta
    xs = np.sort(np.asarray(x, dtype=float))
    u = np.unique(xs)
    emp = np.searchsorted(xs, u, side="right") / len(xs)
    emp_before = np.concatenate(([0.0], emp[:-1]))
    z = zeta(s, 1)
    cdf_at = 1.0 - zeta(s, u + 1) / z
    cdf_before = 1.0 - zeta(s, u) / z
    return float(max(np.abs(emp - cdf_at).max(), np.abs(emp_before - cdf_before).max()))


def powerlaw_gof(sizes: Sequence[int], n_boot: int = 500, seed: int = 0) -> tuple:
    """Fitted exponent and parametric-bootstrap KS p-value for a discrete power law."""
    x = np.asarray(sizes, dtype=np.int64)
    s_hat = fit_zipf_exponent(x)
    d_obs = _zipf_ks(x, s_hat)
    rng = substream(seed, "powerlaw-gof")
    worse = 0
    for _ in range(n_boot):
        sample = rng.zipf(s_hat, size=len(x))
        s_b = fit_zipf_exponent(sample)
        if _zipf_ks(sample, s_b) >= d_obs:
            worse += 1
    return s_hat, (worse + 1) / (n_boot + 1)


def ratio_normality(stories: Sequence[Story], truth: Partition, min_size: int = 10, level: float = 0.05) -> dict:
    """Per-ratio share of large topics whose ratios pass a KS normality test."""
    groups: dict = {}
    for s in stories:
        groups.setdefault(truth.labels[s.id], []).append(s)
    large = [g for g in groups.values() if len(g) >= min_size]
    out = {}
    for r in RATIOS:
        passed = tested = 0
        for g in large:
            xs = np.array([v for v in (s.ratio(r) for s in g) if v is not None])
            if len(xs) < min_size:
                continue
            tested += 1
            sd = xs.std(ddof=1)
            if sd == 0:
                continue
            if stats.kstest(xs, "norm", args=(xs.mean(), sd)).pvalue > level:
                passed += 1
        out[r] = passed / tested if tested else float("nan")
    return out
