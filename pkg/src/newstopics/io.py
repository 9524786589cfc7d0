"""File formats: JSON Lines corpora, flat JSON configs, and result documents."""
from __future__ import annotations

import dataclasses
import json
from pathlib import Path
from typing import Iterable, Sequence

from .estimation import Partition
from .metrics import PairAnnotation
from .model import COMPONENTS, JOINT_TAGS, PAIR_TYPES, RATIOS, HyperParams, Story, TopicParams

STORY_FIELDS = ("id", "window") + COMPONENTS + ("tt_pairs", "ii_pairs", "joint_pairs")


class SchemaError(ValueError):
    """Input file does not match its published schema."""


# ----------------------------------------------------------------- corpus


def _word_list(value, where: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(f"{where}: expected a list of words")
    out = []
    for w in value:
        if isinstance(w, bool) or not isinstance(w, (str, int)):
            raise SchemaError(f"{where}: words must be strings or integers, got {w!r}")
        out.append(str(w))
    return out


def _pair_list(value, where: str, joint: bool) -> list:
    if not isinstance(value, list):
        raise SchemaError(f"{where}: expected a list of pairs")
    out = []
    for p in value:
        if joint and isinstance(p, dict):
            p = list(p.get("pair", [])) + [p.get("tag")]
        size = 3 if joint else 2
        if not isinstance(p, list) or len(p) != size:
            raise SchemaError(f"{where}: expected {size}-element arrays, got {p!r}")
        if joint and p[2] not in JOINT_TAGS:
            raise SchemaError(f"{where}: joint tag must be one of {JOINT_TAGS}, got {p[2]!r}")
        out.append(tuple(str(x) for x in p))
    return out


def story_from_json(obj, lineno: int = 0) -> Story:
    where = f"line {lineno}"
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected a JSON object")
    unknown = set(obj) - set(STORY_FIELDS)
    if unknown:
        raise SchemaError(f"{where}: unknown field(s) {sorted(unknown)}")
    if not isinstance(obj.get("id"), str) or not obj["id"]:
        raise SchemaError(f"{where}: 'id' must be a non-empty string")
    window = obj.get("window", 0)
    if isinstance(window, bool) or not isinstance(window, int) or window < 0:
        raise SchemaError(f"{where}: 'window' must be a non-negative integer")
    kwargs = {c: _word_list(obj.get(c, []), f"{where}.{c}") for c in COMPONENTS}
    kwargs["tt_pairs"] = _pair_list(obj.get("tt_pairs", []), f"{where}.tt_pairs", False)
    kwargs["ii_pairs"] = _pair_list(obj.get("ii_pairs", []), f"{where}.ii_pairs", False)
    kwargs["joint_pairs"] = _pair_list(obj.get("joint_pairs", []), f"{where}.joint_pairs", True)
    try:
        return Story(obj["id"], window, **kwargs)
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from None


def story_to_json(story: Story) -> dict:
    out = {"id": story.id, "window": story.window}
    for c in COMPONENTS:
        out[c] = list(story.words(c))
    out["tt_pairs"] = [list(p) for p in story.tt_pairs]
    out["ii_pairs"] = [list(p) for p in story.ii_pairs]
    out["joint_pairs"] = [list(p) for p in story.joint_pairs]
    return out


def read_corpus(path) -> list:
    stories, seen = [], set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            story = story_from_json(obj, lineno)
            if story.id in seen:
                raise SchemaError(f"line {lineno}: duplicate story id {story.id!r}")
            seen.add(story.id)
            stories.append(story)
    if not stories:
        raise SchemaError(f"{path}: corpus is empty")
    return stories


def write_corpus(stories: Iterable[Story], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in stories:
            fh.write(json.dumps(story_to_json(s), separators=(",", ":")) + "\n")


# ----------------------------------------------------------------- config

HYPER_FIELDS = {f.name for f in dataclasses.fields(HyperParams)}


def load_flat_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: line {exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(data, dict):
        raise SchemaError(f"{path}: config must be a flat JSON object")
    return data


def parse_overrides(items: Sequence[str]) -> dict:
    """``KEY=VALUE`` strings to a dict; values parse as JSON, falling back to strings."""
    out = {}
    for item in items or ():
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise SchemaError(f"--set expects KEY=VALUE, got {item!r}")
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


def hyper_from(config: dict, overrides: dict | None = None) -> HyperParams:
    merged = dict(config)
    merged.update(overrides or {})
    unknown = set(merged) - HYPER_FIELDS
    if unknown:
        raise SchemaError(f"unknown config key(s) {sorted(unknown)}")
    if merged.get("tau_prune") in ("inf", "Infinity"):
        merged["tau_prune"] = float("inf")
    try:
        return HyperParams(**merged)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"invalid config: {exc}") from None


def hyper_to_json(hyper: HyperParams) -> dict:
    out = dataclasses.asdict(hyper)
    for k, v in out.items():
        if isinstance(v, tuple):
            out[k] = list(v)
        if isinstance(v, float) and v == float("inf"):
            out[k] = "inf"
    return out


# ------------------------------------------------------------- partitions


def read_partition(path) -> dict:
    """Story-id -> label map from a detect/oracle/synth-truth document or a bare mapping."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: line {exc.lineno}: invalid JSON ({exc.msg})") from None
    if isinstance(data, dict) and isinstance(data.get("partition"), dict):
        data = data["partition"]
    if not isinstance(data, dict) or not data:
        raise SchemaError(f"{path}: expected a non-empty story-id -> label mapping")
    for k, v in data.items():
        if isinstance(v, (dict, list)) or v is None:
            raise SchemaError(f"{path}: label for {k!r} must be a scalar")
    return data


def read_pairs(path) -> list:
    """Annotated pairs as JSON Lines of ``[a, b, same]`` or ``{"a","b","same_topic"}``."""
    out, seen = [], set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            if isinstance(obj, dict):
                obj = [obj.get("a"), obj.get("b"), obj.get("same_topic")]
            if (not isinstance(obj, list) or len(obj) != 3 or not all(isinstance(x, str) for x in obj[:2])
                    or not isinstance(obj[2], bool)):
                raise SchemaError(f"line {lineno}: expected [story_id, story_id, bool]")
            key = frozenset(obj[:2])
            if key in seen:
                raise SchemaError(f"line {lineno}: duplicate pair {obj[:2]}")
            seen.add(key)
            out.append(PairAnnotation(obj[0], obj[1], obj[2]))
    if not out:
        raise SchemaError(f"{path}: no annotated pairs")
    return out


def write_pairs(pairs: Iterable[PairAnnotation], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(json.dumps([p.a, p.b, p.same_topic]) + "\n")


# ----------------------------------------------------------------- topics


def _pair_key_to_json(key) -> list:
    return list(key)


def topic_to_json(label, topic: TopicParams, top_n: int = 10) -> dict:
    word_freq = {c: dict(sorted(topic.word_freq[c].items(), key=lambda kv: (-kv[1], kv[0]))) for c in COMPONENTS}
    pair_freq = {
        p: [[_pair_key_to_json(k), f] for k, f in sorted(topic.pair_freq[p].items(), key=lambda kv: (-kv[1], kv[0]))]
        for p in PAIR_TYPES
    }
    return {
        "label": label,
        "size": topic.branch_freq,
        "top_words": {c: [[w, f] for w, f in list(word_freq[c].items())[:top_n]] for c in COMPONENTS},
        "top_pairs": {p: pair_freq[p][:top_n] for p in PAIR_TYPES},
        "ratio_gauss": {r: list(topic.ratio_gauss[r]) for r in RATIOS},
        "word_freq": word_freq,
        "pair_freq": pair_freq,
    }


def topic_from_json(obj, where: str) -> TopicParams:
    try:
        word_freq = {c: {str(w): float(f) for w, f in obj["word_freq"].get(c, {}).items()} for c in COMPONENTS}
        pair_freq = {p: {tuple(k): float(f) for k, f in obj.get("pair_freq", {}).get(p, [])} for p in PAIR_TYPES}
        ratio_gauss = {r: tuple(obj.get("ratio_gauss", {}).get(r, (1.0, 1.0))) for r in RATIOS}
        return TopicParams(word_freq, pair_freq, ratio_gauss, int(obj["size"]))
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise SchemaError(f"{where}: malformed topic ({exc})") from None


def partition_to_json(partition: Partition) -> dict:
    return {sid: lab for sid, lab in partition.labels.items()}


def dump_json(doc, path) -> None:
    text = json.dumps(doc, indent=1, allow_nan=False, ensure_ascii=False)
    Path(path).write_text(text + "\n", encoding="utf-8")
