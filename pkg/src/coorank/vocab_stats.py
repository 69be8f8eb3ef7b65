"""Marker occurrence statistics over a statistics corpus.

Counts are occurrence-level (not type-level): ``count_total`` covers
every context utterance, candidate text, and extra response text, while
``count_response`` covers the response side only (candidate texts, which
include the answer, plus extra responses).
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from coorank.corpus_io import Dialogue
from coorank.errors import DataError
from coorank.textnorm import normalize

SNAPSHOT_FORMAT = "coorank-stats"
SNAPSHOT_VERSION = 1


@dataclass(frozen=True)
class VocabStats:
    count_total: dict[str, int]
    count_response: dict[str, int]
    total_tokens: int

    def __post_init__(self):
        for marker, resp in self.count_response.items():
            total = self.count_total.get(marker, 0)
            if not 0 <= resp <= total:
                raise DataError(
                    f"marker {marker!r}: response count {resp} exceeds "
                    f"total count {total}"
                )
        if any(c < 0 for c in self.count_total.values()):
            raise DataError("negative marker count")
        if self.total_tokens != sum(self.count_total.values()):
            raise DataError("total_tokens does not match marker counts")
        # canonical form: zero response counts are represented by absence,
        # so equal statistics always compare (and round-trip) equal
        object.__setattr__(self, "count_total", dict(self.count_total))
        object.__setattr__(
            self,
            "count_response",
            {m: c for m, c in self.count_response.items() if c},
        )

    @cached_property
    def freq_rank(self) -> tuple[str, ...]:
        """Markers by descending total count, ties broken lexicographically."""
        return tuple(sorted(
            self.count_total, key=lambda m: (-self.count_total[m], m)
        ))


def build_stats(
    dialogues: Iterable[Dialogue],
    extra_responses: Mapping[str, Sequence[str]] | None = None,
) -> VocabStats:
    """Accumulate marker occurrence counts over a statistics corpus.

    ``extra_responses`` maps dialogue ids to additional response texts
    (typically a first-pass model's 10-best candidates) that join the
    response side of the counts.
    """
    dialogues = list(dialogues)
    extra_responses = dict(extra_responses or {})
    known_ids = {d.dialogue_id for d in dialogues}
    unknown = sorted(set(extra_responses) - known_ids)
    if unknown:
        raise DataError(
            f"extra responses refer to unknown dialogue id {unknown[0]!r}"
        )

    total: Counter = Counter()
    response: Counter = Counter()
    for dialogue in dialogues:
        for utterance in dialogue.context:
            total.update(normalize(utterance.text))
        for candidate in dialogue.candidates:
            tokens = normalize(candidate.text)
            total.update(tokens)
            response.update(tokens)
        for text in extra_responses.get(dialogue.dialogue_id, ()):
            tokens = normalize(text)
            total.update(tokens)
            response.update(tokens)

    n_tokens = sum(total.values())
    if n_tokens == 0:
        raise DataError("statistics corpus is empty")
    return VocabStats(
        count_total=dict(total),
        count_response=dict(response),
        total_tokens=n_tokens,
    )


def common_words(stats: VocabStats, n: int) -> frozenset[str]:
    """The n most frequent markers (whole vocabulary when n exceeds it)."""
    if n < 0:
        raise ValueError(f"cutoff must be non-negative, got {n}")
    return frozenset(stats.freq_rank[:n])


def save_stats(stats: VocabStats, path: str | Path) -> None:
    snapshot = {
        "format": SNAPSHOT_FORMAT,
        "version": SNAPSHOT_VERSION,
        "total_tokens": stats.total_tokens,
        "markers": {
            marker: [stats.count_total[marker],
                     stats.count_response.get(marker, 0)]
            for marker in sorted(stats.count_total)
        },
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(snapshot, handle, ensure_ascii=False, sort_keys=True)
        handle.write("\n")


def load_stats(path: str | Path) -> VocabStats:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as handle:
            snapshot = json.load(handle)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: corrupt stats snapshot ({exc.msg})") from None
    if not isinstance(snapshot, dict) or snapshot.get("format") != SNAPSHOT_FORMAT:
        raise DataError(f"{path}: not a stats snapshot")
    if snapshot.get("version") != SNAPSHOT_VERSION:
        raise DataError(
            f"{path}: unsupported snapshot version {snapshot.get('version')!r}"
        )
    markers = snapshot.get("markers")
    if not isinstance(markers, dict):
        raise DataError(f"{path}: missing marker table")
    count_total: dict[str, int] = {}
    count_response: dict[str, int] = {}
    for marker, pair in markers.items():
        if (
            not isinstance(pair, list) or len(pair) != 2
            or not all(isinstance(v, int) for v in pair)
        ):
            raise DataError(f"{path}: bad counts for marker {marker!r}")
        count_total[marker] = pair[0]
        if pair[1]:
            count_response[marker] = pair[1]
    total_tokens = snapshot.get("total_tokens")
    if not isinstance(total_tokens, int):
        raise DataError(f"{path}: missing total_tokens")
    if total_tokens == 0:
        raise DataError(f"{path}: empty statistics snapshot")
    try:
        return VocabStats(
            count_total=count_total,
            count_response=count_response,
            total_tokens=total_tokens,
        )
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from None
