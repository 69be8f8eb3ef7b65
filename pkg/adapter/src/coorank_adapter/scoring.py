"""Candidate scoring: dummy lexical baseline or a sentence-pair model."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path

from coorank_adapter.corpus import AdapterError, Dialogue, read_corpus, render_context

_TOKEN_RE = re.compile(r"[a-z0-9]+")

DUMMY_MODEL = "dummy"


@dataclass(frozen=True)
class AdapterConfig:
    model: str = DUMMY_MODEL
    max_seq_len: int = 128
    batch_size: int = 128
    device: str = "cpu"

    def __post_init__(self):
        if self.max_seq_len < 8:
            raise ValueError("max_seq_len must be at least 8")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")


def _tokens(text: str) -> set[str]:
    return set(_TOKEN_RE.findall(text.lower()))


def dummy_score(context_text: str, candidate_text: str) -> float:
    """Fraction of the candidate's token types present in the context."""
    candidate = _tokens(candidate_text)
    if not candidate:
        return 0.0
    context = _tokens(context_text)
    return len(candidate & context) / len(candidate)


def _score_with_dummy(dialogues: list[Dialogue]):
    for d in dialogues:
        context_text = render_context(d)
        for cid, text in d.candidates:
            yield d.dialogue_id, cid, dummy_score(context_text, text)


def _score_with_model(dialogues: list[Dialogue], config: AdapterConfig):
    try:
        import torch
        from transformers import (
            AutoModelForSequenceClassification,
            AutoTokenizer,
        )
    except ImportError as exc:
        raise AdapterError(
            "model scoring needs the optional [model] dependencies "
            f"(torch, transformers): {exc}"
        ) from None
    try:
        tokenizer = AutoTokenizer.from_pretrained(
            config.model, truncation_side="left"
        )
        model = AutoModelForSequenceClassification.from_pretrained(
            config.model
        )
    except Exception as exc:
        raise AdapterError(f"cannot load model {config.model!r}: {exc}") from None
    model.to(config.device)
    model.eval()

    pairs = [
        (d.dialogue_id, cid, render_context(d), text)
        for d in dialogues
        for cid, text in d.candidates
    ]
    with torch.no_grad():
        for start in range(0, len(pairs), config.batch_size):
            batch = pairs[start:start + config.batch_size]
            encoded = tokenizer(
                [ctx for _, _, ctx, _ in batch],
                [cand for _, _, _, cand in batch],
                truncation=True,
                max_length=config.max_seq_len,
                padding=True,
                return_tensors="pt",
            ).to(config.device)
            logits = model(**encoded).logits
            positive = torch.softmax(logits, dim=-1)[:, 1]
            for (did, cid, _, _), prob in zip(batch, positive.tolist()):
                yield did, cid, float(prob)


def score_corpus(
    corpus_path: str | Path,
    out_path: str | Path,
    config: AdapterConfig | None = None,
) -> int:
    """Write one score row per (dialogue, candidate); returns row count.

    The output is written to a temp file and renamed into place so a
    crash never leaves a partial score table behind.
    """
    config = config or AdapterConfig()
    dialogues = read_corpus(corpus_path)
    if config.model == DUMMY_MODEL:
        rows = _score_with_dummy(dialogues)
    else:
        rows = _score_with_model(dialogues, config)

    out_path = Path(out_path)
    tmp_path = out_path.with_name(out_path.name + ".tmp")
    count = 0
    with open(tmp_path, "w", encoding="utf-8") as handle:
        handle.write(f"# coorank-adapter model={config.model}\n")
        for did, cid, score in rows:
            if not 0.0 <= score <= 1.0:
                raise AdapterError(
                    f"model produced score {score} outside [0,1] "
                    f"for ({did!r}, {cid!r})"
                )
            handle.write(f"{did}\t{cid}\t{score:.6f}\n")
            count += 1
    os.replace(tmp_path, out_path)
    return count
