"""Adapter CLI exit codes and wiring."""

import json
import subprocess
import sys

from coorank_adapter.cli import main


def write_corpus(path):
    record = {
        "id": "d1",
        "context": [{"speaker": "a", "text": "install the package"}],
        "candidates": [{"id": "c1", "text": "install it"},
                       {"id": "c2", "text": "no idea"}],
        "answer_id": "c1",
    }
    path.write_text(json.dumps(record) + "\n")


class TestCli:
    def test_score_corpus_dummy(self, tmp_path, capsys):
        corpus = tmp_path / "c.jsonl"
        write_corpus(corpus)
        out = tmp_path / "g.tsv"
        assert main(["score-corpus", "--corpus", str(corpus),
                     "--model", "dummy", "--out", str(out)]) == 0
        assert "scored 2" in capsys.readouterr().err
        assert len(out.read_text().splitlines()) == 3  # header + 2 rows

    def test_missing_flag_is_usage_error(self, capsys):
        assert main(["score-corpus", "--out", "g.tsv"]) == 1
        assert "--corpus" in capsys.readouterr().err

    def test_no_subcommand(self):
        assert main([]) == 1

    def test_malformed_corpus_exit_2(self, tmp_path, capsys):
        corpus = tmp_path / "c.jsonl"
        corpus.write_text("nope\n")
        assert main(["score-corpus", "--corpus", str(corpus),
                     "--model", "dummy",
                     "--out", str(tmp_path / "g.tsv")]) == 2

    def test_unloadable_model_exit_2(self, tmp_path, capsys):
        corpus = tmp_path / "c.jsonl"
        write_corpus(corpus)
        code = main(["score-corpus", "--corpus", str(corpus),
                     "--model", "definitely/not-a-model",
                     "--out", str(tmp_path / "g.tsv")])
        assert code == 2

    def test_finetune_with_unloadable_base_model_exit_2(self, tmp_path):
        corpus = tmp_path / "t.jsonl"
        write_corpus(corpus)
        code = main(["finetune", "--train", str(corpus),
                     "--out", str(tmp_path / "model"),
                     "--base-model", "definitely/not-a-model"])
        assert code == 2

    def test_module_invocation(self):
        result = subprocess.run(
            [sys.executable, "-m", "coorank_adapter.cli", "--version"],
            capture_output=True, text=True,
        )
        assert result.returncode == 0
        assert "coorank-adapter" in result.stdout
