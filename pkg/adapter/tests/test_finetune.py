"""Training-instance construction: ratio, clamping, determinism."""

import json

import pytest

from coorank_adapter.corpus import AdapterError, read_corpus
from coorank_adapter.finetune import TrainConfig, build_instances


def corpus_file(tmp_path, n_dialogues=10, n_candidates=11):
    path = tmp_path / "train.jsonl"
    with open(path, "w", encoding="utf-8") as handle:
        for i in range(n_dialogues):
            record = {
                "id": f"d{i}",
                "context": [{"speaker": "a", "text": f"question {i}"}],
                "candidates": [
                    {"id": f"c{j}", "text": f"answer {i} {j}"}
                    for j in range(n_candidates)
                ],
                "answer_id": "c0",
            }
            handle.write(json.dumps(record) + "\n")
    return path


class TestBuildInstances:
    def test_one_to_four_ratio(self, tmp_path):
        dialogues = read_corpus(corpus_file(tmp_path))
        instances = build_instances(dialogues)
        positives = [i for i in instances if i.label == 1]
        negatives = [i for i in instances if i.label == 0]
        assert len(positives) == 10
        assert len(negatives) == 40

    def test_positive_is_the_answer(self, tmp_path):
        dialogues = read_corpus(corpus_file(tmp_path, n_dialogues=1))
        instances = build_instances(dialogues)
        assert instances[0].label == 1
        assert instances[0].response_text == "answer 0 0"
        assert all(i.response_text != "answer 0 0"
                   for i in instances if i.label == 0)

    def test_clamped_when_few_distractors(self, tmp_path):
        dialogues = read_corpus(corpus_file(tmp_path, n_dialogues=1,
                                            n_candidates=2))
        instances = build_instances(dialogues)
        assert [i.label for i in instances] == [1, 0]

    def test_seeded_sampling_repeatable(self, tmp_path):
        dialogues = read_corpus(corpus_file(tmp_path))
        first = build_instances(dialogues, TrainConfig(seed=7))
        second = build_instances(dialogues, TrainConfig(seed=7))
        assert first == second
        other = build_instances(dialogues, TrainConfig(seed=8))
        assert first != other

    def test_no_answer_dialogue_rejected(self, tmp_path):
        path = tmp_path / "train.jsonl"
        path.write_text(json.dumps({
            "id": "d0",
            "context": [{"speaker": "a", "text": "hi"}],
            "candidates": [{"id": "c0", "text": "yo"}],
            "answer_id": None,
        }) + "\n")
        with pytest.raises(AdapterError, match="no answer"):
            build_instances(read_corpus(path))

    def test_context_rendered_with_speakers(self, tmp_path):
        dialogues = read_corpus(corpus_file(tmp_path, n_dialogues=1))
        instances = build_instances(dialogues)
        assert instances[0].context_text == "a: question 0"
