"""Story and topic types plus the And-Or graph scoring functions.

A story is scored against a topic by walking the grammar top-down: the topic
AND-node sums a text part, an image part, a text/image context term and a Zipf
prior on the topic's branching frequency.  Every leaf term is log-domain so the
total can be exponentiated directly into a likelihood.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

from scipy.special import zeta

TEXT_COMPONENTS = ("who", "where", "what")
IMAGE_COMPONENTS = ("face", "obj")
COMPONENTS = TEXT_COMPONENTS + IMAGE_COMPONENTS

PAIR_TYPES = ("tt", "ii", "joint")
JOINT_TAGS = ("face-who", "face-what", "obj-what")

# ratio name -> (numerator component, denominator component)
TEXT_RATIOS = {
    "wo/wr": ("who", "where"),
    "wo/wt": ("who", "what"),
    "wr/wt": ("where", "what"),
}
JOINT_RATIO = "text/img"
RATIOS = tuple(TEXT_RATIOS) + (JOINT_RATIO,)

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


class InvalidParameterError(ValueError):
    """A numeric parameter is outside its admissible range."""


class InvalidInputError(ValueError):
    """Structurally invalid input (empty model, mismatched ids, ...)."""


def _joint_slots(tag):
    text_c, img_c = {
        "face-who": ("who", "face"),
        "face-what": ("what", "face"),
        "obj-what": ("what", "obj"),
    }[tag]
    return text_c, img_c


@dataclass(frozen=True)
class Story:
    """One tokenized news story.

    ``joint_pairs`` hold ``(text_word, visual_word, tag)`` triples where tag is
    one of ``face-who``, ``face-what`` or ``obj-what``.
    """

    id: str
    window: int = 0
    who: tuple = ()
    where: tuple = ()
    what: tuple = ()
    face: tuple = ()
    obj: tuple = ()
    tt_pairs: tuple = ()
    ii_pairs: tuple = ()
    joint_pairs: tuple = ()

    def __post_init__(self):
        for name in COMPONENTS:
            object.__setattr__(self, name, tuple(str(w) for w in getattr(self, name)))
        object.__setattr__(self, "tt_pairs", tuple((str(a), str(b)) for a, b in self.tt_pairs))
        object.__setattr__(self, "ii_pairs", tuple((str(a), str(b)) for a, b in self.ii_pairs))
        object.__setattr__(
            self, "joint_pairs", tuple((str(a), str(b), str(t)) for a, b, t in self.joint_pairs)
        )
        if not isinstance(self.window, int) or isinstance(self.window, bool) or self.window < 0:
            raise InvalidInputError(f"story {self.id!r}: window must be a non-negative integer")
        self._check_pairs()

    def _check_pairs(self):
        text_words = set(self.who) | set(self.where) | set(self.what)
        for a, b in self.tt_pairs:
            if a not in text_words or b not in text_words:
                raise InvalidInputError(f"story {self.id!r}: tt pair {(a, b)} not drawn from its text words")
        face, obj = set(self.face), set(self.obj)
        for a, b in self.ii_pairs:
            if a not in face or b not in obj:
                raise InvalidInputError(f"story {self.id!r}: ii pair {(a, b)} not drawn from face x obj")
        for a, b, tag in self.joint_pairs:
            if tag not in JOINT_TAGS:
                raise InvalidInputError(f"story {self.id!r}: unknown joint tag {tag!r}")
            text_c, img_c = _joint_slots(tag)
            if a not in getattr(self, text_c) or b not in getattr(self, img_c):
                raise InvalidInputError(f"story {self.id!r}: joint pair {(a, b, tag)} not drawn from {tag}")

    def words(self, c: str) -> tuple:
        return getattr(self, c)

    def pairs(self, p: str) -> tuple:
        return getattr(self, p + "_pairs")

    def count(self, c: str) -> int:
        return len(getattr(self, c))

    @property
    def text_count(self) -> int:
        return len(self.who) + len(self.where) + len(self.what)

    @property
    def image_count(self) -> int:
        return len(self.face) + len(self.obj)

    def ratio(self, name: str):
        """Entity-count ratio ``name`` or None when the denominator is zero."""
        if name == JOINT_RATIO:
            num, den = self.text_count, self.image_count
        else:
            c1, c2 = TEXT_RATIOS[name]
            num, den = self.count(c1), self.count(c2)
        if den == 0:
            return None
        return num / den


@dataclass
class TopicParams:
    word_freq: dict = field(default_factory=lambda: {c: {} for c in COMPONENTS})
    pair_freq: dict = field(default_factory=lambda: {p: {} for p in PAIR_TYPES})
    ratio_gauss: dict = field(default_factory=lambda: {r: (1.0, 1.0) for r in RATIOS})
    branch_freq: int = 1

    def __post_init__(self):
        if self.branch_freq < 1:
            raise InvalidParameterError("branch_freq must be >= 1")
        for c in COMPONENTS:
            self.word_freq.setdefault(c, {})
        for p in PAIR_TYPES:
            self.pair_freq.setdefault(p, {})


@dataclass(frozen=True)
class HyperParams:
    """Model, sampler and tracking hyperparameters.

    Field names double as the keys of the flat JSON config file.
    """

    alpha: float = 0.2
    zipf_s: float = 1.75
    lambda_edge: tuple = (0.1, 0.1, 0.4, 0.1, 0.3)
    tau_prune: float = 160.0  # tuned for raw KL scales; prunes little on normalized histograms
    T0: float = 10.0
    rho: float = 0.97
    sweeps: int = 500
    T_min: float = 0.2
    smoothing_eps: float = 1e-6
    sigma_floor: float = 0.1
    fixed_k: tuple | None = None
    alpha_sim: float = 0.8
    beta_kl: float = 0.005
    lambda_track: tuple = (0.1, 0.1, 0.4, 0.1, 0.3)
    tau_link: float = 0.7
    max_gap: int | None = None
    annealed_target: bool = False
    init: str = "single"
    n_chains: int = 1

    def __post_init__(self):
        object.__setattr__(self, "lambda_edge", tuple(float(x) for x in self.lambda_edge))
        object.__setattr__(self, "lambda_track", tuple(float(x) for x in self.lambda_track))
        if self.fixed_k is not None:
            object.__setattr__(self, "fixed_k", tuple(float(x) for x in self.fixed_k))
        checks = [
            (self.alpha > 0, "alpha must be > 0"),
            (self.zipf_s > 1, "zipf_s must be > 1"),
            (self.tau_prune > 0, "tau_prune must be > 0"),
            (0 < self.rho < 1, "rho must lie in (0, 1)"),
            (self.T0 > 0, "T0 must be > 0"),
            (self.T_min > 0, "T_min must be > 0"),
            (self.sweeps >= 0, "sweeps must be >= 0"),
            (self.smoothing_eps > 0, "smoothing_eps must be > 0"),
            (self.sigma_floor > 0, "sigma_floor must be > 0"),
            (len(self.lambda_edge) == 5, "lambda_edge needs 5 weights"),
            (len(self.lambda_track) == 5, "lambda_track needs 5 weights"),
            (all(x >= 0 for x in self.lambda_edge + self.lambda_track), "lambda weights must be >= 0"),
            (0 <= self.alpha_sim <= 1, "alpha_sim must lie in [0, 1]"),
            (self.beta_kl > 0, "beta_kl must be > 0"),
            (self.tau_link >= 0, "tau_link must be >= 0"),
            (self.max_gap is None or self.max_gap >= 1, "max_gap must be >= 1"),
            (self.init in ("single", "random"), "init must be 'single' or 'random'"),
            (self.n_chains >= 1, "n_chains must be >= 1"),
            (self.fixed_k is None or (len(self.fixed_k) == 2 and self.fixed_k[1] > 0),
             "fixed_k must be (mean, variance>0)"),
        ]
        for ok, msg in checks:
            if not ok:
                raise InvalidParameterError(msg)

    @property
    def anneal(self):
        return (self.T0, self.rho, self.sweeps)


# ---------------------------------------------------------------- scoring


def score_component(words: Sequence[str], topic: TopicParams, c: str) -> float:
    if c not in COMPONENTS:
        raise InvalidParameterError(f"unknown component {c!r}")
    freq = topic.word_freq.get(c, {})
    return math.fsum(math.log1p(freq.get(w, 0.0)) for w in words)


def _pair_sum(pairs, freq: Mapping) -> float:
    return math.fsum(math.log1p(freq.get(p, 0.0)) for p in pairs)


def gaussian_log_term(x: float, mu: float, sigma: float, floor: float = 0.0) -> float:
    """Log-density of N(mu, sigma^2) at x."""
    if not sigma > 0 or sigma < floor:
        raise InvalidParameterError(f"sigma={sigma} below floor {floor}")
    z = (x - mu) / sigma
    return -0.5 * z * z - math.log(sigma) - LOG_SQRT_2PI


@lru_cache(maxsize=64)
def log_zeta(s: float) -> float:
    return math.log(float(zeta(s, 1)))


def zipf_log_prior(f: int, s: float) -> float:
    """ln(f^-s / zeta(s)), the Zipf prior on a topic's branching frequency."""
    if f < 1:
        raise InvalidParameterError(f"branching frequency must be >= 1, got {f}")
    if not s > 1:
        raise InvalidParameterError(f"zipf exponent must be > 1, got {s}")
    return -s * math.log(f) - log_zeta(s)


def _ratio_term(story: Story, topic: TopicParams, name: str) -> float:
    x = story.ratio(name)
    if x is None:
        return 0.0
    mu, sigma = topic.ratio_gauss[name]
    return gaussian_log_term(x, mu, sigma)


def score_text(story: Story, topic: TopicParams) -> float:
    total = [score_component(story.words(c), topic, c) for c in TEXT_COMPONENTS]
    total += [_ratio_term(story, topic, r) for r in TEXT_RATIOS]
    total.append(_pair_sum(story.tt_pairs, topic.pair_freq["tt"]))
    return math.fsum(total)


def score_image(story: Story, topic: TopicParams) -> float:
    total = [score_component(story.words(c), topic, c) for c in IMAGE_COMPONENTS]
    total.append(_pair_sum(story.ii_pairs, topic.pair_freq["ii"]))
    return math.fsum(total)


def score_joint(story: Story, topic: TopicParams) -> float:
    return _ratio_term(story, topic, JOINT_RATIO) + _pair_sum(story.joint_pairs, topic.pair_freq["joint"])


def score_topic(story: Story, topic: TopicParams, hyper: HyperParams) -> float:
    return math.fsum(
        (
            score_text(story, topic),
            score_image(story, topic),
            score_joint(story, topic),
            zipf_log_prior(topic.branch_freq, hyper.zipf_s),
        )
    )


def score_root(story: Story, model: Sequence[TopicParams], hyper: HyperParams):
    """Best topic score for ``story`` and the index of that topic.

    This is the parse of a new story under a fitted model; ties go to the
    lowest index.
    """
    if not model:
        raise InvalidInputError("model has no topics")
    best_k, best = 0, -math.inf
    for k, topic in enumerate(model):
        s = score_topic(story, topic, hyper)
        if s > best:
            best_k, best = k, s
    return best, best_k
