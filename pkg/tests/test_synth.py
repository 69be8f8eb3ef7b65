"""Tests for the synthetic corpus generator."""

import json

import pytest

from coorank.corpus_io import load_corpus, load_scores, write_corpus
from coorank.errors import DataError
from coorank.reranker import baseline_order
from coorank.synth import PlantRecord, SynthSpec, generate, write_plant_log
from coorank.textnorm import FilterLists, marker_types, normalize

NO_FILTERS = FilterLists(frozenset(), frozenset(), frozenset())


def context_markers(dialogue):
    found = set()
    for utterance in dialogue.context:
        found |= marker_types(normalize(utterance.text), NO_FILTERS)
    return found


class TestSynthSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            SynthSpec(n_dialogues=0)
        with pytest.raises(ValueError):
            SynthSpec(p_plant=1.5)
        with pytest.raises(ValueError):
            SynthSpec(answer_rank=11, n_candidates=10)
        with pytest.raises(ValueError):
            SynthSpec(baseline_noise=-0.1)

    def test_from_file(self, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps({"seed": 7, "n_dialogues": 3}))
        spec = SynthSpec.from_file(path)
        assert spec.seed == 7
        assert spec.n_dialogues == 3

    def test_from_file_unknown_key(self, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps({"dialogues": 3}))
        with pytest.raises(DataError, match="unknown synth spec key"):
            SynthSpec.from_file(path)


class TestGenerate:
    def test_same_seed_identical(self):
        spec = SynthSpec(seed=42, n_dialogues=8, vocab_size=40,
                         rare_pool_size=10)
        first = generate(spec)
        second = generate(spec)
        assert first[0] == second[0]
        assert first[1] == second[1]
        assert first[2] == second[2]

    def test_different_seeds_differ(self):
        base = SynthSpec(seed=1, n_dialogues=4, vocab_size=40,
                         rare_pool_size=10)
        other = SynthSpec(seed=2, n_dialogues=4, vocab_size=40,
                          rare_pool_size=10)
        assert generate(base)[0] != generate(other)[0]

    def test_structure(self):
        spec = SynthSpec(seed=3, n_dialogues=5, n_candidates=7,
                         vocab_size=40, rare_pool_size=10)
        dialogues, scores, log = generate(spec)
        assert len(dialogues) == 5
        assert len(log) == 5
        for d in dialogues:
            assert len(d.candidates) == 7
            assert d.answer_id is not None
            ids = [c.candidate_id for c in d.candidates]
            assert len(set(ids)) == 7
            assert d.answer_id in ids
            assert len(d.context) >= 2
        assert len(scores) == 35

    def test_scores_on_grid_and_distinct(self):
        spec = SynthSpec(seed=4, n_dialogues=6, vocab_size=40,
                         rare_pool_size=10, baseline_noise=0.05)
        dialogues, scores, _ = generate(spec)
        for d in dialogues:
            values = scores.for_dialogue(d)
            assert len(set(values)) == len(values)
            for v in values:
                assert 0.0 < v < 1.0
                assert abs(v * 10000 - round(v * 10000)) < 1e-6

    def test_answer_rank_control(self):
        spec = SynthSpec(seed=5, n_dialogues=10, vocab_size=40,
                         rare_pool_size=10, answer_rank=2)
        dialogues, scores, log = generate(spec)
        for d, record in zip(dialogues, log):
            assert record.target_rank == 2
            ordered = baseline_order(d, scores)
            position = next(
                i for i, (c, _) in enumerate(ordered)
                if c.candidate_id == d.answer_id
            )
            assert position + 1 == 2

    def test_p_plant_zero_no_signal(self):
        spec = SynthSpec(seed=6, n_dialogues=8, vocab_size=40,
                         rare_pool_size=10, p_plant=0.0)
        dialogues, _, log = generate(spec)
        assert all(not record.planted for record in log)
        for d in dialogues:
            ctx = context_markers(d)
            for cand in d.candidates:
                cand_markers = marker_types(normalize(cand.text), NO_FILTERS)
                assert ctx.isdisjoint(cand_markers)

    def test_p_plant_one_signal_only_in_answer(self):
        spec = SynthSpec(seed=7, n_dialogues=8, vocab_size=40,
                         rare_pool_size=10, p_plant=1.0)
        dialogues, _, log = generate(spec)
        for d, record in zip(dialogues, log):
            assert record.planted
            assert record.marker_word is not None
            planted_marker = normalize(record.marker_word)[0]
            ctx = context_markers(d)
            assert planted_marker in ctx
            for cand in d.candidates:
                overlap = ctx & marker_types(normalize(cand.text), NO_FILTERS)
                if cand.candidate_id == d.answer_id:
                    assert overlap == {planted_marker}
                else:
                    assert overlap == set()

    def test_cross_talk_creates_distractor_overlap(self):
        spec = SynthSpec(seed=8, n_dialogues=6, vocab_size=40,
                         rare_pool_size=10, p_plant=0.0, cross_talk=1.0,
                         decoration_rate=0.0)
        dialogues, _, _ = generate(spec)
        for d in dialogues:
            ctx = context_markers(d)
            for cand in d.candidates:
                if cand.candidate_id == d.answer_id:
                    continue
                assert ctx & marker_types(normalize(cand.text), NO_FILTERS)

    def test_round_trips_through_wire_formats(self, tmp_path):
        spec = SynthSpec(seed=9, n_dialogues=6, vocab_size=40,
                         rare_pool_size=10, decoration_rate=0.3)
        dialogues, scores, _ = generate(spec)
        corpus_path = tmp_path / "corpus.jsonl"
        write_corpus(dialogues, corpus_path)
        loaded, report = load_corpus(corpus_path)
        assert loaded == dialogues
        assert report.total_dropped == 0

        from coorank.corpus_io import write_scores

        scores_path = tmp_path / "scores.tsv"
        write_scores(scores, scores_path)
        assert load_scores(scores_path, loaded) == scores


class TestPlantLog:
    def test_log_format(self, tmp_path):
        spec = SynthSpec(seed=10, n_dialogues=3, vocab_size=40,
                         rare_pool_size=10, p_plant=1.0)
        _, _, log = generate(spec)
        path = tmp_path / "plant.tsv"
        write_plant_log(log, spec, path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# synthetic corpus plant log")
        assert lines[1] == "# generator=python-random-mt19937"
        assert lines[2].startswith("# spec=")
        assert json.loads(lines[2].split("=", 1)[1])["seed"] == 10
        data_rows = [line for line in lines if not line.startswith("#")]
        assert len(data_rows) == 3
        for line in data_rows:
            did, planted, marker, answer_id, rank = line.split("\t")
            assert planted == "1"
            assert marker != "-"
            assert int(rank) >= 1

    def test_log_records_match(self):
        spec = SynthSpec(seed=11, n_dialogues=4, vocab_size=40,
                         rare_pool_size=10)
        dialogues, _, log = generate(spec)
        for d, record in zip(dialogues, log):
            assert isinstance(record, PlantRecord)
            assert record.dialogue_id == d.dialogue_id
            assert record.answer_id == d.answer_id
