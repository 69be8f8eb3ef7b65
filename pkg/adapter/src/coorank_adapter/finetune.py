"""Binary-classification training-set construction and fine-tuning.

Each labelled dialogue yields one positive (its answer) and up to
``negative_ratio`` negatives sampled from the remaining candidates with
a seeded generator, so instance construction is reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from coorank_adapter.corpus import AdapterError, Dialogue, render_context
from coorank_adapter.scoring import AdapterConfig


@dataclass(frozen=True)
class TrainInstance:
    dialogue_id: str
    label: int
    context_text: str
    response_text: str


@dataclass(frozen=True)
class TrainConfig:
    negative_ratio: int = 4
    seed: int = 0
    epochs: int = 3
    batch_size: int = 128
    learning_rate: float = 2e-5
    dropout: float = 0.1

    def __post_init__(self):
        if self.negative_ratio < 0:
            raise ValueError("negative_ratio must be non-negative")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be positive")


def build_instances(
    dialogues: list[Dialogue], config: TrainConfig | None = None
) -> list[TrainInstance]:
    """One positive plus up to ratio sampled negatives per dialogue."""
    config = config or TrainConfig()
    rng = random.Random(config.seed)
    instances: list[TrainInstance] = []
    for d in dialogues:
        if d.answer_id is None:
            raise AdapterError(
                f"dialogue {d.dialogue_id!r} has no answer; convert or drop "
                "no-answer dialogues before building training instances"
            )
        by_id = dict(d.candidates)
        if d.answer_id not in by_id:
            raise AdapterError(
                f"dialogue {d.dialogue_id!r}: answer {d.answer_id!r} not "
                "among candidates"
            )
        context_text = render_context(d)
        instances.append(TrainInstance(
            dialogue_id=d.dialogue_id,
            label=1,
            context_text=context_text,
            response_text=by_id[d.answer_id],
        ))
        distractors = [
            text for cid, text in d.candidates if cid != d.answer_id
        ]
        for text in rng.sample(
            distractors, min(config.negative_ratio, len(distractors))
        ):
            instances.append(TrainInstance(
                dialogue_id=d.dialogue_id,
                label=0,
                context_text=context_text,
                response_text=text,
            ))
    return instances


def finetune(
    train_corpus_path: str | Path,
    out_dir: str | Path,
    base_model: str,
    adapter_config: AdapterConfig | None = None,
    train_config: TrainConfig | None = None,
) -> Path:
    """Fine-tune a sentence-pair classifier and save it under out_dir.

    Needs the optional [model] dependencies and a reachable base model;
    the saved artifact loads back through score_corpus with
    ``--model out_dir``.
    """
    from coorank_adapter.corpus import read_corpus

    adapter_config = adapter_config or AdapterConfig(model=base_model)
    train_config = train_config or TrainConfig()
    instances = build_instances(read_corpus(train_corpus_path), train_config)
    if not instances:
        raise AdapterError("no training instances could be built")

    try:
        import torch
        from transformers import (
            AutoModelForSequenceClassification,
            AutoTokenizer,
        )
    except ImportError as exc:
        raise AdapterError(
            "fine-tuning needs the optional [model] dependencies "
            f"(torch, transformers): {exc}"
        ) from None
    try:
        tokenizer = AutoTokenizer.from_pretrained(
            base_model, truncation_side="left"
        )
        model = AutoModelForSequenceClassification.from_pretrained(
            base_model,
            num_labels=2,
            hidden_dropout_prob=train_config.dropout,
        )
    except Exception as exc:
        raise AdapterError(f"cannot load model {base_model!r}: {exc}") from None

    device = adapter_config.device
    model.to(device)
    model.train()
    optimizer = torch.optim.AdamW(
        model.parameters(), lr=train_config.learning_rate
    )
    order = list(range(len(instances)))
    shuffler = random.Random(train_config.seed)
    for _ in range(train_config.epochs):
        shuffler.shuffle(order)
        for start in range(0, len(order), train_config.batch_size):
            batch = [instances[i] for i in
                     order[start:start + train_config.batch_size]]
            encoded = tokenizer(
                [inst.context_text for inst in batch],
                [inst.response_text for inst in batch],
                truncation=True,
                max_length=adapter_config.max_seq_len,
                padding=True,
                return_tensors="pt",
            ).to(device)
            labels = torch.tensor([inst.label for inst in batch],
                                  device=device)
            loss = model(**encoded, labels=labels).loss
            loss.backward()
            optimizer.step()
            optimizer.zero_grad()

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    return out_dir
