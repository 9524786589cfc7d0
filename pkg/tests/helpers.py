import math
import random

from newstopics.model import COMPONENTS, JOINT_TAGS, RATIOS, HyperParams, Story, TopicParams

VOCAB = {c: [f"{c[:2]}{i}" for i in range(6)] for c in COMPONENTS}
JOINT_SLOTS = {"face-who": ("who", "face"), "face-what": ("what", "face"), "obj-what": ("what", "obj")}


def random_story(rng: random.Random, sid="s", window=0, max_words=6, pair_p=0.5) -> Story:
    words = {c: [rng.choice(VOCAB[c]) for _ in range(rng.randint(0, max_words))] for c in COMPONENTS}
    text = words["who"] + words["where"] + words["what"]
    tt, ii, joint = [], [], []
    if len(text) >= 2 and rng.random() < pair_p:
        tt = [tuple(rng.sample(text, 2)) for _ in range(rng.randint(1, 3))]
    if words["face"] and words["obj"] and rng.random() < pair_p:
        ii = [(rng.choice(words["face"]), rng.choice(words["obj"])) for _ in range(rng.randint(1, 2))]
    for tag, (tc, ic) in JOINT_SLOTS.items():
        if words[tc] and words[ic] and rng.random() < pair_p:
            joint.append((rng.choice(words[tc]), rng.choice(words[ic]), tag))
    return Story(sid, window, tt_pairs=tt, ii_pairs=ii, joint_pairs=joint, **words)


def random_topic(rng: random.Random) -> TopicParams:
    def freqs(keys):
        chosen = [k for k in keys if rng.random() < 0.6]
        w = [rng.random() for _ in chosen]
        total = sum(w) or 1.0
        return {k: x / total for k, x in zip(chosen, w)}

    word_freq = {c: freqs(VOCAB[c]) for c in COMPONENTS}
    text = VOCAB["who"] + VOCAB["where"] + VOCAB["what"]
    pair_freq = {
        "tt": freqs([(a, b) for a in text[:8] for b in text[8:14]]),
        "ii": freqs([(a, b) for a in VOCAB["face"] for b in VOCAB["obj"]]),
        "joint": freqs([(a, b, t) for t, (tc, ic) in JOINT_SLOTS.items() for a in VOCAB[tc][:3] for b in VOCAB[ic][:3]]),
    }
    ratio_gauss = {r: (rng.uniform(0.1, 3.0), rng.uniform(0.1, 2.0)) for r in RATIOS}
    return TopicParams(word_freq, pair_freq, ratio_gauss, rng.randint(1, 50))


def planted_corpus(n_topics=3, per_topic=(3, 3, 2), words_per=6, seed=0, overlap=0) -> tuple:
    """Stories whose topics use disjoint vocabularies (plus ``overlap`` shared words)."""
    rng = random.Random(seed)
    stories, truth = [], {}
    i = 0
    for t in range(n_topics):
        for _ in range(per_topic[t]):
            words = {}
            for c in COMPONENTS:
                pool = [f"{c[:2]}{t}_{k}" for k in range(4)] + [f"{c[:2]}x{k}" for k in range(overlap)]
                words[c] = [rng.choice(pool) for _ in range(words_per)]
            sid = f"d{i}"
            stories.append(Story(sid, 0, **words))
            truth[sid] = t
            i += 1
    return stories, truth




def rel_close(a, b, tol=1e-10):
    return math.isclose(a, b, rel_tol=tol, abs_tol=tol)
