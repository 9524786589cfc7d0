import json

import pytest

from newstopics import io
from newstopics.metrics import PairAnnotation
from newstopics.model import HyperParams, Story
from newstopics.synth import SynthConfig, generate
from newstopics.estimation import fit_topic


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_corpus_round_trip(tmp_path):
    stories, _ = generate(SynthConfig(n_topics=3, n_stories=20, pair_rate=0.2, seed=4))
    path = tmp_path / "c.jsonl"
    io.write_corpus(stories, path)
    assert io.read_corpus(path) == stories


def test_minimal_story_defaults(tmp_path):
    path = write_lines(tmp_path / "c.jsonl", ['{"id": "a", "who": ["x", 3]}', "", '{"id": "b"}'])
    a, b = io.read_corpus(path)
    assert a.window == 0 and a.who == ("x", "3")
    assert b.what == ()


@pytest.mark.parametrize("line, needle", [
    ('{"id": "a", "colour": []}', "unknown field"),
    ('{"who": []}', "'id'"),
    ('{"id": "a", "window": -1}', "window"),
    ('{"id": "a", "who": "x"}', "list of words"),
    ('{"id": "a", "tt_pairs": [["x"]]}', "2-element"),
    ('{"id": "a", "joint_pairs": [["x", "y", "bogus"]]}', "joint tag"),
    ('{"id": "a", "who": [', "invalid JSON"),
    ('[1, 2]', "JSON object"),
])
def test_schema_errors_carry_line_numbers(tmp_path, line, needle):
    path = write_lines(tmp_path / "c.jsonl", ['{"id": "ok"}', line])
    with pytest.raises(io.SchemaError) as err:
        io.read_corpus(path)
    assert "line 2" in str(err.value) and needle in str(err.value)


def test_duplicate_ids_and_empty(tmp_path):
    with pytest.raises(io.SchemaError, match="duplicate"):
        io.read_corpus(write_lines(tmp_path / "d.jsonl", ['{"id": "a"}', '{"id": "a"}']))
    with pytest.raises(io.SchemaError, match="empty"):
        io.read_corpus(write_lines(tmp_path / "e.jsonl", [""]))


def test_config_and_overrides(tmp_path):
    cfg = tmp_path / "h.json"
    cfg.write_text(json.dumps({"alpha": 0.5, "sweeps": 10, "tau_prune": "inf"}))
    h = io.hyper_from(io.load_flat_config(cfg), io.parse_overrides(["sweeps=3", "init=random"]))
    assert (h.alpha, h.sweeps, h.init, h.tau_prune) == (0.5, 3, "random", float("inf"))
    assert io.hyper_from(io.hyper_to_json(h)) == h
    with pytest.raises(io.SchemaError, match="unknown"):
        io.hyper_from({"alhpa": 1})
    with pytest.raises(io.SchemaError, match="invalid config"):
        io.hyper_from({"rho": 2.0})
    with pytest.raises(io.SchemaError):
        io.parse_overrides(["novalue"])
    cfg.write_text("[1]")
    with pytest.raises(io.SchemaError):
        io.load_flat_config(cfg)


def test_partition_and_pairs(tmp_path):
    p = tmp_path / "p.json"
    p.write_text(json.dumps({"format": "x", "partition": {"a": 0, "b": 1}}))
    assert io.read_partition(p) == {"a": 0, "b": 1}
    p.write_text(json.dumps({"a": [0]}))
    with pytest.raises(io.SchemaError):
        io.read_partition(p)
    pairs = [PairAnnotation("a", "b", True), PairAnnotation("b", "c", False)]
    io.write_pairs(pairs, tmp_path / "pairs.jsonl")
    assert io.read_pairs(tmp_path / "pairs.jsonl") == pairs
    bad = write_lines(tmp_path / "bad.jsonl", ['["a", "b", true]', '{"a": "b", "b": "a", "same_topic": false}'])
    with pytest.raises(io.SchemaError, match="line 2: duplicate"):
        io.read_pairs(bad)


def test_topic_round_trip():
    stories = [Story("a", who=["x", "y"], what=["p"], tt_pairs=[("x", "p")], face=["f"],
                     joint_pairs=[("x", "f", "face-who")]),
               Story("b", who=["x"], what=["p", "q"], obj=["o"])]
    topic = fit_topic(stories, HyperParams())
    doc = json.loads(json.dumps(io.topic_to_json(0, topic, top_n=1)))
    assert doc["top_words"]["who"] == [["x", pytest.approx(2 / 3)]]
    back = io.topic_from_json(doc, "t")
    assert back.word_freq == topic.word_freq and back.branch_freq == 2
    assert back.pair_freq == topic.pair_freq
    with pytest.raises(io.SchemaError):
        io.topic_from_json({"size": 1}, "t")
