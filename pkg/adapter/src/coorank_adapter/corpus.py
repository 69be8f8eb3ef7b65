"""Minimal reader for the dialogue JSONL wire format.

Just enough structure to score candidates: no cleaning, every dialogue
in the file is kept. Feed already-cleaned corpora when the scores must
join strictly downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


class AdapterError(ValueError):
    """Malformed corpus or unusable model configuration."""


@dataclass(frozen=True)
class Dialogue:
    dialogue_id: str
    turns: tuple[tuple[str, str], ...]       # (speaker, text), oldest first
    candidates: tuple[tuple[str, str], ...]  # (candidate_id, text)
    answer_id: str | None


def read_corpus(path: str | Path) -> list[Dialogue]:
    path = Path(path)
    dialogues: list[Dialogue] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            where = f"{path}:{lineno}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise AdapterError(f"{where}: invalid JSON ({exc.msg})") from None
            if not isinstance(record, dict):
                raise AdapterError(f"{where}: record is not an object")
            try:
                did = str(record["id"])
                context = record["context"]
                candidates = record["candidates"]
            except KeyError as exc:
                raise AdapterError(
                    f"{where}: missing field {exc.args[0]!r}"
                ) from None
            if not isinstance(context, list) or not isinstance(candidates, list):
                raise AdapterError(
                    f"{where}: context and candidates must be lists"
                )
            if did in seen:
                raise AdapterError(f"{where}: duplicate dialogue id {did!r}")
            seen.add(did)
            try:
                turns = tuple(
                    (str(u.get("speaker", "")), str(u["text"]))
                    for u in context
                )
                cands = tuple(
                    (str(c["id"]), str(c["text"])) for c in candidates
                )
            except (TypeError, KeyError):
                raise AdapterError(f"{where}: bad utterance or candidate")
            if not cands:
                raise AdapterError(f"{where}: dialogue has no candidates")
            answer = record.get("answer_id")
            dialogues.append(Dialogue(
                dialogue_id=did,
                turns=turns,
                candidates=cands,
                answer_id=None if answer is None else str(answer),
            ))
    return dialogues


def render_context(dialogue: Dialogue) -> str:
    """Flatten the context into one segment, newest utterance last.

    Speaker labels are kept as a ``speaker:`` prefix per utterance; how
    multi-party structure should reach a sentence-pair model is
    underdetermined, so this is the documented choice.
    """
    return "\n".join(f"{speaker}: {text}" for speaker, text in dialogue.turns)
