"""Independent, deliberately naive re-implementations used as test oracles.

Nothing here imports scoring code from the package; only plain data types.
"""
import itertools
import math
from fractions import Fraction

# B_2k for the Euler-Maclaurin tail
_BERNOULLI = [Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30), Fraction(5, 66),
              Fraction(-691, 2730), Fraction(7, 6)]


def zeta_em(s: float, n: int = 40) -> float:
    """Riemann zeta by Euler-Maclaurin summation; error far below 1e-12 for s > 1."""
    head = sum(k ** -s for k in range(1, n))
    tail = n ** (1 - s) / (s - 1) + 0.5 * n ** -s
    rising = s  # s (s+1) ... (s+2k-2)
    for k, b in enumerate(_BERNOULLI, start=1):
        if k > 1:
            rising *= (s + 2 * k - 3) * (s + 2 * k - 2)
        tail += float(b) / math.factorial(2 * k) * rising * n ** (-s - 2 * k + 1)
    return head + tail


def log_normal_pdf(x, mu, sigma):
    return -((x - mu) ** 2) / (2 * sigma**2) - math.log(sigma * math.sqrt(2 * math.pi))


def _logsum(keys, table):
    total = 0.0
    for k in keys:
        total += math.log(table.get(k, 0.0) + 1.0)
    return total


def naive_score(story, topic, s=1.75):
    """Text + image + joint + Zipf prior, written out term by term."""
    wo, wr, wt = list(story.who), list(story.where), list(story.what)
    fa, ob = list(story.face), list(story.obj)
    wf, pf, rg = topic.word_freq, topic.pair_freq, topic.ratio_gauss

    text = _logsum(wo, wf["who"]) + _logsum(wr, wf["where"]) + _logsum(wt, wf["what"])
    for name, num, den in (("wo/wr", wo, wr), ("wo/wt", wo, wt), ("wr/wt", wr, wt)):
        if len(den):
            text += log_normal_pdf(len(num) / len(den), *rg[name])
    text += _logsum(list(story.tt_pairs), pf["tt"])

    image = _logsum(fa, wf["face"]) + _logsum(ob, wf["obj"]) + _logsum(list(story.ii_pairs), pf["ii"])

    joint = _logsum(list(story.joint_pairs), pf["joint"])
    n_img = len(fa) + len(ob)
    if n_img:
        joint += log_normal_pdf((len(wo) + len(wr) + len(wt)) / n_img, *rg["text/img"])

    prior = math.log(topic.branch_freq ** -s / zeta_em(s))
    return text + image + joint + prior


def naive_kl(p: dict, q: dict) -> float:
    return sum(p[w] * math.log(p[w] / q[w]) for w in p)


def smooth(counts: dict, vocab, eps):
    n = sum(counts.get(w, 0) for w in vocab)
    if n == 0:
        return {w: 1 / len(vocab) for w in vocab}
    rel = {w: counts.get(w, 0) / n for w in vocab}
    return {w: (rel[w] + eps) / (1 + eps * len(vocab)) for w in vocab}


def naive_edge_distance(a, b, lambdas, eps=1e-6):
    total = 0.0
    for lam, c in zip(lambdas, ("who", "where", "what", "face", "obj")):
        ca, cb = {}, {}
        for w in a.words(c):
            ca[w] = ca.get(w, 0) + 1
        for w in b.words(c):
            cb[w] = cb.get(w, 0) + 1
        vocab = sorted(set(ca) | set(cb))
        if not vocab:
            continue
        pa, pb = smooth(ca, vocab, eps), smooth(cb, vocab, eps)
        total += lam * (naive_kl(pa, pb) + naive_kl(pb, pa)) / 2
    return total


def naive_fit(stories, sigma_floor=0.1):
    """Topic parameters by explicit counting, returned as plain dicts."""
    word_freq = {}
    for c in ("who", "where", "what", "face", "obj"):
        counts = {}
        for st in stories:
            for w in st.words(c):
                counts[w] = counts.get(w, 0) + 1
        n = sum(counts.values())
        word_freq[c] = {w: k / n for w, k in counts.items()}
    pair_freq = {}
    for p in ("tt", "ii", "joint"):
        counts = {}
        for st in stories:
            for pr in st.pairs(p):
                counts[pr] = counts.get(pr, 0) + 1
        n = sum(counts.values())
        pair_freq[p] = {k: v / n for k, v in counts.items()}
    ratio_gauss = {}
    for r in ("wo/wr", "wo/wt", "wr/wt", "text/img"):
        xs = [x for x in (st.ratio(r) for st in stories) if x is not None]
        if not xs:
            ratio_gauss[r] = (1.0, sigma_floor)
        elif len(xs) == 1:
            ratio_gauss[r] = (xs[0], sigma_floor)
        else:
            m = sum(xs) / len(xs)
            sd = math.sqrt(sum((x - m) ** 2 for x in xs) / (len(xs) - 1))
            ratio_gauss[r] = (m, max(sd, sigma_floor))
    return word_freq, pair_freq, ratio_gauss


def naive_log_posterior(stories, labels, hyper):
    """Sum over stories of the assigned topic's score minus alpha*N*K, with topics refit per cluster."""
    from newstopics.model import TopicParams  # plain container

    groups = {}
    for st in stories:
        groups.setdefault(labels[st.id], []).append(st)
    total = 0.0
    for members in groups.values():
        wf, pf, rg = naive_fit(members, hyper.sigma_floor)
        topic = TopicParams(wf, pf, rg, len(members))
        for st in members:
            total += naive_score(st, topic, hyper.zipf_s)
    total -= hyper.alpha * len(stories) * len(groups)
    if hyper.fixed_k is not None:
        mu, var = hyper.fixed_k
        k = len(groups)
        total += -((k - mu) ** 2) / (2 * var) - 0.5 * math.log(2 * math.pi * var)
    return total


def bfs_components(n, edges):
    adj = {v: [] for v in range(n)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen, out = set(), []
    for v in range(n):
        if v in seen:
            continue
        comp, queue = {v}, [v]
        seen.add(v)
        while queue:
            x = queue.pop(0)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.add(y)
                    queue.append(y)
        out.append(comp)
    return out


def naive_partitions(items):
    """Every set partition of ``items`` by recursive insertion (independent of RGS enumeration)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in naive_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def brute_accuracy(pred, truth):
    """Best injective mapping by exhaustive search over permutations."""
    ids = sorted(pred)
    plabs = sorted(set(pred.values()), key=str)
    tlabs = sorted(set(truth.values()), key=str)
    best = 0
    small, big = (plabs, tlabs) if len(plabs) <= len(tlabs) else (tlabs, plabs)
    for perm in itertools.permutations(big, len(small)):
        m = dict(zip(small, perm))
        if len(plabs) <= len(tlabs):
            hits = sum(m[pred[s]] == truth[s] for s in ids)
        else:
            hits = sum(m[truth[s]] == pred[s] for s in ids)
        best = max(best, hits)
    return best / len(ids)


def counting_nmi(pred, truth):
    ids = list(pred)
    n = len(ids)
    joint, pa, pb = {}, {}, {}
    for s in ids:
        joint[(pred[s], truth[s])] = joint.get((pred[s], truth[s]), 0) + 1
        pa[pred[s]] = pa.get(pred[s], 0) + 1
        pb[truth[s]] = pb.get(truth[s], 0) + 1
    ha = -sum(c / n * math.log(c / n) for c in pa.values())
    hb = -sum(c / n * math.log(c / n) for c in pb.values())
    if ha == 0 and hb == 0:
        return 1.0
    if ha == 0 or hb == 0:
        return 0.0
    mi = sum(c / n * math.log(c * n / (pa[a] * pb[b])) for (a, b), c in joint.items())
    return mi / math.sqrt(ha * hb)


def naive_pairwise_pr(pred, truth):
    """Pairwise precision and recall by looping over every unordered pair."""
    ids = sorted(pred)
    tp = fp = fn = 0
    for a, b in itertools.combinations(ids, 2):
        same_p, same_t = pred[a] == pred[b], truth[a] == truth[b]
        tp += same_p and same_t
        fp += same_p and not same_t
        fn += same_t and not same_p
    return (tp / (tp + fp) if tp + fp else 1.0), (tp / (tp + fn) if tp + fn else 1.0)
