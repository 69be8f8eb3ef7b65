"""Corpus, score-table, and ranked-run wire formats.

File formats:
- dialogue corpus: UTF-8 JSON lines, one dialogue per line:
  {"id": ..., "context": [{"speaker": ..., "text": ...}, ...],
   "candidates": [{"id": ..., "text": ...}, ...], "answer_id": ...|null}
- score table: TSV ``dialogue_id<TAB>candidate_id<TAB>score``
- ranked run: TSV ``dialogue_id<TAB>rank<TAB>candidate_id<TAB>S<TAB>G<TAB>Coor``
  with reals at 6 decimals

Blank lines and ``#`` comment lines are skipped in the TSV formats.
All loaded structures are immutable and safe for concurrent reads.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from coorank.errors import DataError

DROP_NO_ANSWER = "drop-no-answer"
CONVERT_NO_ANSWER = "convert-no-answer"
CLEANING_POLICIES = (DROP_NO_ANSWER, CONVERT_NO_ANSWER)

_CONVERTED_ID = "converted_answer"


@dataclass(frozen=True)
class Utterance:
    speaker: str
    text: str


@dataclass(frozen=True)
class Candidate:
    candidate_id: str
    text: str


@dataclass(frozen=True)
class Dialogue:
    dialogue_id: str
    context: tuple[Utterance, ...]
    candidates: tuple[Candidate, ...]
    answer_id: str | None = None

    def candidate(self, candidate_id: str) -> Candidate:
        for cand in self.candidates:
            if cand.candidate_id == candidate_id:
                return cand
        raise KeyError(candidate_id)

    @property
    def answer(self) -> Candidate | None:
        if self.answer_id is None:
            return None
        return self.candidate(self.answer_id)


@dataclass
class CleaningReport:
    """Per-reason counts of dialogues dropped while loading a corpus."""

    kept: int = 0
    dropped: Counter = field(default_factory=Counter)
    errors: list[str] = field(default_factory=list)

    @property
    def total_dropped(self) -> int:
        return sum(self.dropped.values())


class ScoreTable:
    """First-pass scores keyed by (dialogue_id, candidate_id)."""

    def __init__(self, scores: Mapping[tuple[str, str], float]):
        for key, value in scores.items():
            if not 0.0 <= value <= 1.0:
                raise DataError(
                    f"score out of [0,1] for {key}: {value!r}"
                )
        self._scores = dict(scores)

    def __getitem__(self, key: tuple[str, str]) -> float:
        return self._scores[key]

    def __len__(self) -> int:
        return len(self._scores)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ScoreTable) and self._scores == other._scores

    def items(self) -> Iterator[tuple[tuple[str, str], float]]:
        return iter(self._scores.items())

    def for_dialogue(self, dialogue: Dialogue) -> list[float]:
        did = dialogue.dialogue_id
        return [
            self._scores[(did, c.candidate_id)] for c in dialogue.candidates
        ]


@dataclass(frozen=True)
class RunRow:
    rank: int
    candidate_id: str
    fused: float
    generic: float
    coor: float


class RankedRun:
    """Ordered candidate lists per dialogue, highest fused score first."""

    def __init__(self, entries: Mapping[str, tuple[RunRow, ...]]):
        for did, rows in entries.items():
            if [row.rank for row in rows] != list(range(1, len(rows) + 1)):
                raise DataError(f"run {did}: ranks are not contiguous 1..n")
            for a, b in zip(rows, rows[1:]):
                if a.fused < b.fused:
                    raise DataError(
                        f"run {did}: fused score increases at rank {b.rank}"
                    )
        self._entries = {did: tuple(rows) for did, rows in entries.items()}

    def __getitem__(self, dialogue_id: str) -> tuple[RunRow, ...]:
        return self._entries[dialogue_id]

    def __contains__(self, dialogue_id: str) -> bool:
        return dialogue_id in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RankedRun) and self._entries == other._entries

    def dialogue_ids(self) -> list[str]:
        return list(self._entries)

    def items(self) -> Iterator[tuple[str, tuple[RunRow, ...]]]:
        return iter(self._entries.items())

    def answer_rank(self, dialogue: Dialogue) -> int:
        """Rank of the dialogue's answer candidate within this run."""
        if dialogue.answer_id is None:
            raise DataError(
                f"dialogue {dialogue.dialogue_id} has no answer to rank"
            )
        for row in self._entries[dialogue.dialogue_id]:
            if row.candidate_id == dialogue.answer_id:
                return row.rank
        raise DataError(
            f"run {dialogue.dialogue_id}: answer "
            f"{dialogue.answer_id!r} missing from ranked list"
        )


def round6(value: float) -> float:
    """Round to the run file's 6-decimal wire precision."""
    return round(value, 6)


def _iter_content_lines(path: Path) -> Iterator[tuple[int, str]]:
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line


def _parse_dialogue(record: object, where: str) -> Dialogue:
    if not isinstance(record, dict):
        raise DataError(f"{where}: record is not an object")
    try:
        dialogue_id = record["id"]
        raw_context = record["context"]
        raw_candidates = record["candidates"]
    except KeyError as exc:
        raise DataError(f"{where}: missing field {exc.args[0]!r}") from None
    answer_id = record.get("answer_id")
    if not isinstance(dialogue_id, str) or not dialogue_id:
        raise DataError(f"{where}: dialogue id must be a non-empty string")
    if not isinstance(raw_context, list) or not isinstance(raw_candidates, list):
        raise DataError(f"{where}: context and candidates must be lists")

    context = []
    for item in raw_context:
        if not isinstance(item, dict) or "text" not in item:
            raise DataError(f"{where}: bad context utterance {item!r}")
        context.append(
            Utterance(speaker=str(item.get("speaker", "")), text=str(item["text"]))
        )

    candidates = []
    seen = set()
    for item in raw_candidates:
        if not isinstance(item, dict) or "id" not in item or "text" not in item:
            raise DataError(f"{where}: bad candidate {item!r}")
        cid = str(item["id"])
        if cid in seen:
            raise DataError(f"{where}: duplicate candidate id {cid!r}")
        seen.add(cid)
        candidates.append(Candidate(candidate_id=cid, text=str(item["text"])))

    if answer_id is not None:
        answer_id = str(answer_id)
        if answer_id not in seen:
            raise DataError(
                f"{where}: answer_id {answer_id!r} not among candidates"
            )

    return Dialogue(
        dialogue_id=dialogue_id,
        context=tuple(context),
        candidates=tuple(candidates),
        answer_id=answer_id,
    )


def _clean_dialogue(
    dialogue: Dialogue, policy: str, report: CleaningReport
) -> Dialogue | None:
    context = tuple(u for u in dialogue.context if u.text.strip())

    if any(not c.text.strip() for c in dialogue.candidates):
        report.dropped["empty_candidate"] += 1
        return None

    candidates = dialogue.candidates
    answer_id = dialogue.answer_id
    if answer_id is None:
        if policy == DROP_NO_ANSWER:
            report.dropped["no_answer"] += 1
            return None
        if not context:
            report.dropped["empty_context"] += 1
            return None
        answer_text = context[-1].text
        context = context[:-1]
        answer_id = _CONVERTED_ID
        existing = {c.candidate_id for c in candidates}
        while answer_id in existing:
            answer_id += "_"
        candidates = candidates + (Candidate(answer_id, answer_text),)

    if not context:
        report.dropped["empty_context"] += 1
        return None

    return Dialogue(
        dialogue_id=dialogue.dialogue_id,
        context=context,
        candidates=candidates,
        answer_id=answer_id,
    )


def clean_corpus(
    dialogues: Iterable[Dialogue], policy: str = DROP_NO_ANSWER
) -> tuple[list[Dialogue], CleaningReport]:
    """Apply the cleaning policy to already-parsed dialogues."""
    if policy not in CLEANING_POLICIES:
        raise ValueError(f"unknown cleaning policy {policy!r}")
    report = CleaningReport()
    kept = []
    for dialogue in dialogues:
        cleaned = _clean_dialogue(dialogue, policy, report)
        if cleaned is not None:
            kept.append(cleaned)
    report.kept = len(kept)
    return kept, report


def load_corpus(
    path: str | Path,
    policy: str = DROP_NO_ANSWER,
    strict: bool = True,
) -> tuple[list[Dialogue], CleaningReport]:
    """Load, validate, and clean a dialogue corpus file.

    In lenient mode malformed records are counted and collected in the
    report instead of raising; duplicate dialogue ids are always fatal.
    """
    if policy not in CLEANING_POLICIES:
        raise ValueError(f"unknown cleaning policy {policy!r}")
    path = Path(path)
    report = CleaningReport()
    kept: list[Dialogue] = []
    seen_ids: set[str] = set()
    for lineno, line in _iter_content_lines(path):
        where = f"{path}:{lineno}"
        try:
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{where}: invalid JSON ({exc.msg})") from None
            dialogue = _parse_dialogue(record, where)
        except DataError as exc:
            if strict:
                raise
            report.dropped["malformed"] += 1
            report.errors.append(str(exc))
            continue
        if dialogue.dialogue_id in seen_ids:
            raise DataError(
                f"{where}: duplicate dialogue id {dialogue.dialogue_id!r}"
            )
        seen_ids.add(dialogue.dialogue_id)
        cleaned = _clean_dialogue(dialogue, policy, report)
        if cleaned is not None:
            kept.append(cleaned)
    report.kept = len(kept)
    return kept, report


def write_corpus(dialogues: Iterable[Dialogue], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for d in dialogues:
            record = {
                "id": d.dialogue_id,
                "context": [
                    {"speaker": u.speaker, "text": u.text} for u in d.context
                ],
                "candidates": [
                    {"id": c.candidate_id, "text": c.text}
                    for c in d.candidates
                ],
                "answer_id": d.answer_id,
            }
            handle.write(json.dumps(record, ensure_ascii=False,
                                    separators=(",", ":")) + "\n")


def load_scores(path: str | Path, corpus: Iterable[Dialogue]) -> ScoreTable:
    """Load a score TSV and strictly join it against the corpus.

    Every (dialogue, candidate) pair in the corpus must be scored, every
    row must refer to a known pair, and scores must lie in [0,1].
    """
    path = Path(path)
    corpus = list(corpus)
    known = {
        (d.dialogue_id, c.candidate_id)
        for d in corpus
        for c in d.candidates
    }
    scores: dict[tuple[str, str], float] = {}
    for lineno, line in _iter_content_lines(path):
        where = f"{path}:{lineno}"
        parts = line.split("\t")
        if len(parts) != 3:
            raise DataError(
                f"{where}: expected 3 tab-separated columns, got {len(parts)}"
            )
        did, cid, raw_score = parts
        try:
            value = float(raw_score)
        except ValueError:
            raise DataError(f"{where}: invalid score {raw_score!r}") from None
        if not 0.0 <= value <= 1.0:
            raise DataError(
                f"{where}: score {value} outside [0,1] for ({did!r}, {cid!r})"
            )
        key = (did, cid)
        if key not in known:
            raise DataError(f"{where}: unknown pair ({did!r}, {cid!r})")
        if key in scores:
            raise DataError(f"{where}: duplicate entry for ({did!r}, {cid!r})")
        scores[key] = value
    for d in corpus:
        for c in d.candidates:
            if (d.dialogue_id, c.candidate_id) not in scores:
                raise DataError(
                    f"{path}: missing score for "
                    f"({d.dialogue_id!r}, {c.candidate_id!r})"
                )
    return ScoreTable(scores)


def write_scores(scores: ScoreTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for (did, cid), value in scores.items():
            handle.write(f"{did}\t{cid}\t{value:.6f}\n")


def write_run(
    run: RankedRun, path: str | Path, header_lines: Iterable[str] = ()
) -> None:
    """Emit a run as TSV with 6-decimal reals; byte-deterministic."""
    with open(path, "w", encoding="utf-8") as handle:
        for line in header_lines:
            handle.write(f"# {line}\n")
        for did, rows in run.items():
            for row in rows:
                handle.write(
                    f"{did}\t{row.rank}\t{row.candidate_id}"
                    f"\t{row.fused:.6f}\t{row.generic:.6f}\t{row.coor:.6f}\n"
                )


def load_run(path: str | Path) -> RankedRun:
    path = Path(path)
    per_dialogue: dict[str, dict[int, RunRow]] = {}
    order: list[str] = []
    for lineno, line in _iter_content_lines(path):
        where = f"{path}:{lineno}"
        parts = line.split("\t")
        if len(parts) != 6:
            raise DataError(
                f"{where}: expected 6 tab-separated columns, got {len(parts)}"
            )
        did, raw_rank, cid, raw_s, raw_g, raw_coor = parts
        try:
            row = RunRow(
                rank=int(raw_rank),
                candidate_id=cid,
                fused=float(raw_s),
                generic=float(raw_g),
                coor=float(raw_coor),
            )
        except ValueError as exc:
            raise DataError(f"{where}: {exc}") from None
        if did not in per_dialogue:
            per_dialogue[did] = {}
            order.append(did)
        if row.rank in per_dialogue[did]:
            raise DataError(f"{where}: duplicate rank {row.rank} for {did!r}")
        per_dialogue[did][row.rank] = row
    entries = {}
    for did in order:
        rows = per_dialogue[did]
        entries[did] = tuple(rows[r] for r in sorted(rows))
    return RankedRun(entries)
