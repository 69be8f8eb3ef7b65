"""Tests for corpus/score/run parsing, cleaning, and round-trips."""

import json

import pytest

from coorank.corpus_io import (
    CONVERT_NO_ANSWER,
    Candidate,
    Dialogue,
    RankedRun,
    RunRow,
    ScoreTable,
    Utterance,
    clean_corpus,
    load_corpus,
    load_run,
    load_scores,
    write_corpus,
    write_run,
    write_scores,
)
from coorank.errors import DataError


def record(did="d1", context=None, candidates=None, answer_id="c1"):
    if context is None:
        context = [{"speaker": "a", "text": "hello world"}]
    if candidates is None:
        candidates = [{"id": "c1", "text": "some answer"}]
    return {
        "id": did,
        "context": context,
        "candidates": candidates,
        "answer_id": answer_id,
    }


def write_jsonl(path, records):
    path.write_text(
        "".join(json.dumps(r) + "\n" for r in records), encoding="utf-8"
    )


class TestLoadCorpus:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text("")
        dialogues, report = load_corpus(path)
        assert dialogues == []
        assert report.kept == 0
        assert report.total_dropped == 0

    def test_empty_candidate_drops_dialogue(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [record(candidates=[
            {"id": "c1", "text": "fine"},
            {"id": "c2", "text": "   "},
        ])])
        dialogues, report = load_corpus(path)
        assert dialogues == []
        assert report.dropped["empty_candidate"] == 1

    def test_drop_no_answer_policy(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [record(answer_id=None), record(did="d2")])
        dialogues, report = load_corpus(path)
        assert [d.dialogue_id for d in dialogues] == ["d2"]
        assert report.dropped["no_answer"] == 1

    def test_convert_no_answer_policy(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [record(
            context=[
                {"speaker": "a", "text": "first turn"},
                {"speaker": "b", "text": "final reply"},
            ],
            answer_id=None,
        )])
        dialogues, report = load_corpus(path, policy=CONVERT_NO_ANSWER)
        (d,) = dialogues
        assert len(d.context) == 1
        assert d.context[0].text == "first turn"
        assert d.answer is not None
        assert d.answer.text == "final reply"
        assert len(d.candidates) == 2
        assert report.total_dropped == 0

    def test_convert_exhausting_context_drops(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [record(
            context=[{"speaker": "a", "text": "only turn"}], answer_id=None,
        )])
        dialogues, report = load_corpus(path, policy=CONVERT_NO_ANSWER)
        assert dialogues == []
        assert report.dropped["empty_context"] == 1

    def test_whitespace_utterances_removed(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [record(context=[
            {"speaker": "a", "text": "  "},
            {"speaker": "b", "text": "keep me"},
        ])])
        (d,), _ = load_corpus(path)
        assert [u.text for u in d.context] == ["keep me"]

    def test_all_whitespace_context_drops(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [record(context=[{"speaker": "a", "text": " "}])])
        dialogues, report = load_corpus(path)
        assert dialogues == []
        assert report.dropped["empty_context"] == 1

    def test_duplicate_dialogue_id_fatal_even_lenient(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [record(), record()])
        with pytest.raises(DataError, match="duplicate dialogue id"):
            load_corpus(path, strict=False)

    def test_malformed_strict_raises_with_location(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text(json.dumps(record()) + "\nnot json\n")
        with pytest.raises(DataError, match=r"corpus\.jsonl:2"):
            load_corpus(path)

    def test_malformed_lenient_collects(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        bad_answer = record(did="d2", answer_id="missing")
        path.write_text(
            json.dumps(record()) + "\n{broken\n" + json.dumps(bad_answer) + "\n"
        )
        dialogues, report = load_corpus(path, strict=False)
        assert [d.dialogue_id for d in dialogues] == ["d1"]
        assert report.dropped["malformed"] == 2
        assert len(report.errors) == 2

    def test_duplicate_candidate_ids_malformed(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [record(candidates=[
            {"id": "c1", "text": "x"}, {"id": "c1", "text": "y"},
        ])])
        with pytest.raises(DataError, match="duplicate candidate id"):
            load_corpus(path)

    def test_cleaning_is_idempotent(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [
            record(),
            record(did="d2", answer_id=None),
            record(did="d3", candidates=[{"id": "c1", "text": ""}]),
        ])
        dialogues, _ = load_corpus(path)
        again, report = clean_corpus(dialogues)
        assert again == dialogues
        assert report.total_dropped == 0

    def test_round_trip(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        original = [
            Dialogue(
                dialogue_id="d1",
                context=(Utterance("alice", "héllo there"),),
                candidates=(
                    Candidate("c1", "resp one"), Candidate("c2", "resp two"),
                ),
                answer_id="c2",
            ),
        ]
        write_corpus(original, path)
        loaded, report = load_corpus(path)
        assert loaded == original
        assert report.total_dropped == 0


class TestScores:
    @pytest.fixture
    def corpus(self):
        return [Dialogue(
            dialogue_id="d1",
            context=(Utterance("a", "hi"),),
            candidates=(
                Candidate("c1", "x"), Candidate("c2", "y"),
                Candidate("c3", "z"),
            ),
            answer_id="c1",
        )]

    def test_exact_join(self, tmp_path, corpus):
        path = tmp_path / "scores.tsv"
        path.write_text("d1\tc1\t0.9\nd1\tc2\t0.5\nd1\tc3\t0.1\n")
        table = load_scores(path, corpus)
        assert len(table) == 3
        assert table[("d1", "c2")] == 0.5
        assert table.for_dialogue(corpus[0]) == [0.9, 0.5, 0.1]

    def test_out_of_range_names_row(self, tmp_path, corpus):
        path = tmp_path / "scores.tsv"
        path.write_text("d1\tc1\t1.2\nd1\tc2\t0.5\nd1\tc3\t0.1\n")
        with pytest.raises(DataError, match=r"scores\.tsv:1.*1\.2"):
            load_scores(path, corpus)

    def test_missing_pair_named(self, tmp_path, corpus):
        path = tmp_path / "scores.tsv"
        path.write_text("d1\tc1\t0.9\nd1\tc3\t0.1\n")
        with pytest.raises(DataError, match=r"missing score for \('d1', 'c2'\)"):
            load_scores(path, corpus)

    def test_unknown_pair_fatal(self, tmp_path, corpus):
        path = tmp_path / "scores.tsv"
        path.write_text(
            "d1\tc1\t0.9\nd1\tc2\t0.5\nd1\tc3\t0.1\nd9\tc1\t0.5\n"
        )
        with pytest.raises(DataError, match="unknown pair"):
            load_scores(path, corpus)

    def test_comments_and_blanks_skipped(self, tmp_path, corpus):
        path = tmp_path / "scores.tsv"
        path.write_text(
            "# produced by a scorer\n\nd1\tc1\t0.9\nd1\tc2\t0.5\nd1\tc3\t0.1\n"
        )
        assert len(load_scores(path, corpus)) == 3

    def test_round_trip(self, tmp_path, corpus):
        table = ScoreTable({
            ("d1", "c1"): 0.875, ("d1", "c2"): 0.5, ("d1", "c3"): 0.0,
        })
        path = tmp_path / "scores.tsv"
        write_scores(table, path)
        assert load_scores(path, corpus) == table

    def test_score_table_rejects_out_of_range(self):
        with pytest.raises(DataError):
            ScoreTable({("d1", "c1"): -0.1})


def one_row_run(fused=1.0, generic=1.0, coor=0.0):
    return RankedRun({
        "d1": (RunRow(1, "c1", fused, generic, coor),),
    })


class TestRuns:
    def test_formatting_contract(self, tmp_path):
        path = tmp_path / "run.tsv"
        write_run(one_row_run(), path)
        content = path.read_text()
        assert content == "d1\t1\tc1\t1.000000\t1.000000\t0.000000\n"

    def test_empty_run_empty_file(self, tmp_path):
        path = tmp_path / "run.tsv"
        write_run(RankedRun({}), path)
        assert path.read_text() == ""

    def test_byte_determinism(self, tmp_path):
        run = RankedRun({"d1": (
            RunRow(1, "c2", 0.75, 0.5, 0.833333),
            RunRow(2, "c1", 0.6, 0.6, 0.0),
        )})
        a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
        write_run(run, a)
        write_run(run, b)
        assert a.read_bytes() == b.read_bytes()

    def test_round_trip(self, tmp_path):
        run = RankedRun({
            "d1": (
                RunRow(1, "c2", 0.75, 0.5, 0.833333),
                RunRow(2, "c1", 0.6, 0.6, 0.0),
            ),
            "d2": (RunRow(1, "c1", 0.5, 0.5, 0.0),),
        })
        path = tmp_path / "run.tsv"
        write_run(run, path, header_lines=["w_g=1.0", "w_coor=0.5"])
        assert load_run(path) == run

    def test_non_contiguous_ranks_rejected(self):
        with pytest.raises(DataError, match="contiguous"):
            RankedRun({"d1": (RunRow(2, "c1", 0.5, 0.5, 0.0),)})

    def test_increasing_fused_rejected(self):
        with pytest.raises(DataError, match="increases"):
            RankedRun({"d1": (
                RunRow(1, "c1", 0.4, 0.4, 0.0),
                RunRow(2, "c2", 0.5, 0.5, 0.0),
            )})

    def test_answer_rank(self):
        run = RankedRun({"d1": (
            RunRow(1, "c2", 0.9, 0.9, 0.0),
            RunRow(2, "c1", 0.5, 0.5, 0.0),
        )})
        dialogue = Dialogue(
            dialogue_id="d1",
            context=(Utterance("a", "hi"),),
            candidates=(Candidate("c1", "x"), Candidate("c2", "y")),
            answer_id="c1",
        )
        assert run.answer_rank(dialogue) == 2
