"""Command-line front end.

Exit codes: 0 success, 1 runtime error, 2 input or schema error.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

import numpy as np

from . import io, report
from .estimation import Partition, log_posterior
from .metrics import clustering_accuracy, nmi, pairs_from_truth, pairwise_pr
from .model import InvalidInputError, InvalidParameterError
from .oracle import exact_map
from .swc import run_swc
from .synth import SynthConfig, generate
from .tracking import TopicNode, build_trajectories

log = logging.getLogger("newstopics")

EXIT_RUNTIME = 1
EXIT_INPUT = 2


def _hyper(args):
    return io.hyper_from(io.load_flat_config(args.config), io.parse_overrides(args.set))


def _figure_path(args, suffix: str) -> Path:
    return Path(args.figures) / f"{Path(args.out).stem}.{suffix}.png"


def _detect_doc(corpus, partition, score, trace, hyper, seed, top_n):
    windows = sorted({s.window for s in corpus})
    return {
        "format": "newstopics.detect/1",
        "seed": seed,
        "windows": windows,
        "n_stories": len(corpus),
        "k": partition.k,
        "log_posterior": score,
        "config": io.hyper_to_json(hyper),
        "partition": io.partition_to_json(partition),
        "topics": [io.topic_to_json(lab, partition.topics[lab], top_n) for lab in sorted(partition.topics)],
        "trace": {"current": trace.current, "best": trace.best, "temperature": trace.temperature},
    }


def cmd_detect(args) -> int:
    hyper = _hyper(args)
    corpus = io.read_corpus(args.corpus)
    if args.window is not None:
        corpus = [s for s in corpus if s.window == args.window]
        if not corpus:
            raise io.SchemaError(f"no stories in window {args.window}")
    partition, trace = run_swc(corpus, hyper, seed=args.seed)
    score = log_posterior(partition, corpus, hyper)
    io.dump_json(_detect_doc(corpus, partition, score, trace, hyper, args.seed, args.top_n), args.out)
    log.info("detect: %d stories -> %d topics, log posterior %.3f", len(corpus), partition.k, score)
    if args.figures:
        report.plot_trace(trace, _figure_path(args, "trace"))
        report.plot_topic_sizes([t.branch_freq for t in partition.topics.values()], _figure_path(args, "sizes"))
    return 0


def _read_topics_file(path):
    import json

    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise io.SchemaError(f"{path}: line {exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("topics"), list):
        raise io.SchemaError(f"{path}: not a detect output (missing 'topics')")
    windows = doc.get("windows")
    if not isinstance(windows, list) or len(windows) != 1:
        raise io.SchemaError(f"{path}: a topics file must cover exactly one window, got {windows!r}")
    window = windows[0]
    nodes = []
    for i, t in enumerate(doc["topics"]):
        params = io.topic_from_json(t, f"{path}: topics[{i}]")
        nodes.append(TopicNode(window, t.get("label", i), params, params.branch_freq))
    return window, nodes


def cmd_track(args) -> int:
    hyper = _hyper(args)
    per_window = {}
    for path in args.topics:
        window, nodes = _read_topics_file(path)
        if window in per_window:
            raise io.SchemaError(f"window {window} appears in more than one topics file")
        per_window[window] = nodes
    windows = [per_window[w] for w in sorted(per_window)]
    traj = build_trajectories(windows, hyper)
    node_id = [f"w{n.window}:t{n.label}" for n in traj.nodes]
    doc = {
        "format": "newstopics.track/1",
        "config": io.hyper_to_json(hyper),
        "nodes": [
            {
                "id": node_id[i],
                "window": n.window,
                "label": n.label,
                "size": n.size,
                "top_words": {c: [w for w, _ in sorted(f.items(), key=lambda kv: (-kv[1], kv[0]))[:5]]
                              for c, f in n.params.word_freq.items()},
            }
            for i, n in enumerate(traj.nodes)
        ],
        "links": [{"source": node_id[a], "target": node_id[b], "similarity": s} for a, b, s in traj.links],
        "trajectories": {name: [node_id[i] for i in members] for name, members in traj.chains.items()},
    }
    io.dump_json(doc, args.out)
    if args.figures:
        report.plot_trajectories(doc, _figure_path(args, "trajectories"))
    return 0


def _parse_sweep(text: str):
    try:
        lo, hi, steps = text.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise io.SchemaError(f"--sweep-alpha expects lo:hi:steps, got {text!r}") from None
    if steps < 1 or lo <= 0 or hi < lo:
        raise io.SchemaError("--sweep-alpha needs 0 < lo <= hi and steps >= 1")
    return np.linspace(lo, hi, steps).tolist()


def cmd_eval(args) -> int:
    if args.truth:
        truth = io.read_partition(args.truth)
        annotations = pairs_from_truth(truth)
    else:
        truth = None
        annotations = io.read_pairs(args.pairs)

    def metrics(labels):
        if truth is not None and set(truth) != set(labels):
            raise io.SchemaError("partition and truth cover different story ids")
        try:
            p, r = pairwise_pr(labels, annotations)
        except InvalidInputError as exc:
            raise io.SchemaError(str(exc)) from None
        out = {"precision": p, "recall": r, "f1": 0.0 if p + r == 0 else 2 * p * r / (p + r),
               "n_pairs": len(annotations)}
        if truth is not None:
            out["accuracy"] = clustering_accuracy(labels, truth)
            out["nmi"] = nmi(labels, truth)
        return out

    doc = {"format": "newstopics.eval/1"}
    if args.partition:
        doc.update(metrics(io.read_partition(args.partition)))
    if args.sweep_alpha:
        if not args.corpus:
            raise io.SchemaError("--sweep-alpha needs --corpus")
        base = _hyper(args)
        corpus = io.read_corpus(args.corpus)
        points = []
        for alpha in _parse_sweep(args.sweep_alpha):
            hyper = dataclasses.replace(base, alpha=alpha)
            partition, _ = run_swc(corpus, hyper, seed=args.seed)
            point = {"alpha": alpha, "k": partition.k}
            point.update(metrics(partition.labels))
            points.append(point)
        doc["sweep"] = points
        if args.figures:
            report.plot_pr_curve(points, _figure_path(args, "pr"))
    io.dump_json(doc, args.out)
    return 0


def _synth_config(args) -> SynthConfig:
    raw = io.load_flat_config(args.config)
    fields = {f.name for f in dataclasses.fields(SynthConfig)}
    unknown = set(raw) - fields
    if unknown:
        raise io.SchemaError(f"unknown synth config key(s) {sorted(unknown)}")
    if args.seed is not None:
        raw["seed"] = args.seed
    try:
        return SynthConfig(**raw)
    except (TypeError, ValueError) as exc:
        raise io.SchemaError(f"invalid synth config: {exc}") from None


def cmd_synth(args) -> int:
    config = _synth_config(args)
    stories, truth = generate(config)
    io.write_corpus(stories, args.out)
    truth_out = args.truth_out or str(Path(args.out).with_suffix("")) + ".truth.json"
    io.dump_json({"format": "newstopics.truth/1", "config": config.to_dict(),
                  "partition": io.partition_to_json(truth)}, truth_out)
    if args.figures:
        report.plot_topic_sizes([t.branch_freq for t in truth.topics.values()], _figure_path(args, "sizes"),
                                title="Planted topic sizes")
    return 0


def cmd_oracle(args) -> int:
    hyper = _hyper(args)
    corpus = io.read_corpus(args.corpus)
    partition, score = exact_map(corpus, hyper)
    doc = {"format": "newstopics.oracle/1", "n_stories": len(corpus), "k": partition.k,
           "log_posterior": score, "partition": io.partition_to_json(partition)}
    io.dump_json(doc, args.out)
    if args.figures:
        report.plot_topic_sizes([t.branch_freq for t in partition.topics.values()], _figure_path(args, "sizes"),
                                title="Exact MAP topic sizes")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="newstopics", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", help="flat JSON file of hyperparameters")
            p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config value")
        p.add_argument("--out", required=True)
        p.add_argument("--figures", metavar="DIR", help="also write PNG figures into DIR")

    p = sub.add_parser("detect", help="cluster a corpus into topics")
    p.add_argument("--corpus", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window", type=int, help="only use stories from this window")
    p.add_argument("--top-n", type=int, default=10)
    common(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("track", help="link per-window topics into trajectories")
    p.add_argument("--topics", nargs="+", required=True)
    common(p)
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("eval", help="score a partition against truth or annotated pairs")
    p.add_argument("--partition")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--truth")
    group.add_argument("--pairs")
    p.add_argument("--sweep-alpha", metavar="LO:HI:STEPS")
    p.add_argument("--corpus", help="corpus to re-detect in sweep mode")
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate a synthetic corpus with planted topics")
    p.add_argument("--seed", type=int)
    p.add_argument("--config", help="flat JSON file of generator settings")
    p.add_argument("--truth-out")
    common(p, config=False)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("oracle", help="exact MAP partition of a tiny corpus")
    p.add_argument("--corpus", required=True)
    common(p)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "eval" and not (args.partition or args.sweep_alpha):
        parser.error("eval needs --partition and/or --sweep-alpha")
    try:
        return args.func(args)
    except (io.SchemaError, InvalidInputError, InvalidParameterError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
