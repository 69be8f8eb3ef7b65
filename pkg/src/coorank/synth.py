"""Seeded synthetic corpora with controllable coordination signal.

Context text draws from one word pool and candidate text from a
disjoint pool (disjoint at the marker level), so distractors never
overlap the context. With probability ``p_plant`` a dialogue's answer
shares one rare-pool word with the context, which is then the only
source of coordination signal. Generic scores place the answer at a
controlled baseline rank.

Generation is a pure function of the spec: one Mersenne-Twister stream
seeded from ``spec.seed``, consumed in a fixed order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path
from random import Random
from typing import Mapping

from coorank.corpus_io import Candidate, Dialogue, ScoreTable, Utterance
from coorank.errors import DataError
from coorank.textnorm import FilterLists, normalize

_SYLLABLES = [
    c + v
    for c in "bdfgklmnprstvz"
    for v in ("a", "e", "i", "o", "u")
]
_SUFFIXES = ("", "", "", "", "s", "ing", "ed", "ation")
_DECORATIONS = (
    "3.14", "12:30", "1,024", "http://example.org/doc", "www.mirror.test",
    "/usr/share/doc", "~/notes/todo", "10.0.0.1:8080", "192.168.1.1",
    "readme.txt", ":-)", "==",
)


@dataclass(frozen=True)
class SynthSpec:
    seed: int = 0
    n_dialogues: int = 100
    n_candidates: int = 10
    vocab_size: int = 200
    rare_pool_size: int = 50
    p_plant: float = 0.5
    baseline_noise: float = 0.02
    answer_rank: int | None = None
    cross_talk: float = 0.0
    decoration_rate: float = 0.1

    def __post_init__(self):
        if min(self.n_dialogues, self.n_candidates, self.vocab_size,
               self.rare_pool_size) < 1:
            raise ValueError("all counts must be positive")
        if self.vocab_size < 2:
            raise ValueError("vocab_size must be at least 2")
        for name in ("p_plant", "cross_talk", "decoration_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in [0,1]")
        if self.baseline_noise < 0:
            raise ValueError("baseline_noise must be non-negative")
        if self.answer_rank is not None and not (
            1 <= self.answer_rank <= self.n_candidates
        ):
            raise ValueError("answer_rank must be in 1..n_candidates")

    @classmethod
    def from_mapping(cls, mapping: Mapping) -> "SynthSpec":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(mapping) - known)
        if unknown:
            raise DataError(f"unknown synth spec key {unknown[0]!r}")
        return cls(**dict(mapping))

    @classmethod
    def from_file(cls, path: str | Path) -> "SynthSpec":
        path = Path(path)
        try:
            with open(path, encoding="utf-8") as handle:
                mapping = json.load(handle)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid synth spec ({exc.msg})") from None
        if not isinstance(mapping, dict):
            raise DataError(f"{path}: synth spec must be a JSON object")
        try:
            return cls.from_mapping(mapping)
        except (ValueError, TypeError) as exc:
            raise DataError(f"{path}: {exc}") from None

    def to_mapping(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class PlantRecord:
    dialogue_id: str
    planted: bool
    marker_word: str | None
    answer_id: str
    target_rank: int


def _make_word(rng: Random) -> str:
    stemless = "".join(
        rng.choice(_SYLLABLES) for _ in range(rng.randrange(2, 5))
    )
    return stemless + rng.choice(_SUFFIXES)


def _build_pools(rng: Random, spec: SynthSpec, ignore: frozenset[str]):
    """Three surface-word pools with pairwise disjoint marker sets."""
    pools: list[list[str]] = [[], [], []]
    targets = [
        (spec.vocab_size + 1) // 2,
        spec.vocab_size // 2,
        spec.rare_pool_size,
    ]
    seen_markers: set[str] = set()
    attempts = 0
    while any(len(p) < t for p, t in zip(pools, targets)):
        attempts += 1
        if attempts > 200 * sum(targets):
            raise DataError("vocabulary generation did not converge")
        word = _make_word(rng)
        markers = normalize(word)
        if len(markers) != 1:
            continue
        marker = markers[0]
        if marker in seen_markers or marker in ignore:
            continue
        for pool, target in zip(pools, targets):
            if len(pool) < target:
                seen_markers.add(marker)
                pool.append(word)
                break
    return pools


def _sentence(rng: Random, pool: list[str], length: int,
              spec: SynthSpec) -> list[str]:
    words = [rng.choice(pool) for _ in range(length)]
    if rng.random() < spec.decoration_rate:
        words.insert(rng.randrange(len(words) + 1), rng.choice(_DECORATIONS))
    return words


def _g_values(rng: Random, spec: SynthSpec) -> list[float]:
    """Strictly descending scores on a 1e-4 grid (survives 6dp files)."""
    n = spec.n_candidates
    if n == 1:
        return [round(0.5 + rng.uniform(-spec.baseline_noise,
                                        spec.baseline_noise), 4)]
    step = 0.8 / (n - 1)
    values = [
        round(0.9 - i * step
              + rng.uniform(-spec.baseline_noise, spec.baseline_noise), 4)
        for i in range(n)
    ]
    values.sort(reverse=True)
    for i in range(len(values)):
        values[i] = min(values[i], round(0.9990 - 0.0001 * i, 4))
        if i > 0:
            values[i] = min(values[i], round(values[i - 1] - 0.0001, 4))
        values[i] = round(max(values[i], 0.0001), 4)
    for a, b in zip(values, values[1:]):
        if a <= b:
            raise DataError("generated scores are not strictly descending")
    return values


def generate(
    spec: SynthSpec,
) -> tuple[list[Dialogue], ScoreTable, list[PlantRecord]]:
    rng = Random(spec.seed)
    ignore = FilterLists.bundled().ignore_set
    context_pool, response_pool, rare_pool = _build_pools(rng, spec, ignore)

    id_width = max(2, len(str(spec.n_dialogues - 1)))
    cand_width = max(2, len(str(spec.n_candidates - 1)))
    dialogues: list[Dialogue] = []
    scores: dict[tuple[str, str], float] = {}
    log: list[PlantRecord] = []

    for index in range(spec.n_dialogues):
        did = f"syn{index:0{id_width}d}"
        utterances = [
            _sentence(rng, context_pool, rng.randrange(4, 9), spec)
            for _ in range(rng.randrange(2, 5))
        ]

        answer_position = rng.randrange(spec.n_candidates)
        candidate_words = [
            _sentence(rng, response_pool, rng.randrange(3, 8), spec)
            for _ in range(spec.n_candidates)
        ]
        for position, words in enumerate(candidate_words):
            if position == answer_position:
                continue
            if rng.random() < spec.cross_talk:
                utterance = rng.choice(utterances)
                words.insert(rng.randrange(len(words) + 1),
                             rng.choice(utterance))

        planted = rng.random() < spec.p_plant
        marker_word = None
        if planted:
            marker_word = rng.choice(rare_pool)
            utterance = rng.choice(utterances)
            utterance.insert(rng.randrange(len(utterance) + 1), marker_word)
            answer_words = candidate_words[answer_position]
            answer_words.insert(rng.randrange(len(answer_words) + 1),
                                marker_word)

        target_rank = spec.answer_rank or rng.randrange(
            1, spec.n_candidates + 1
        )
        values = _g_values(rng, spec)
        answer_g = values[target_rank - 1]
        rest = values[:target_rank - 1] + values[target_rank:]
        rng.shuffle(rest)

        candidates = []
        rest_iter = iter(rest)
        answer_id = f"c{answer_position:0{cand_width}d}"
        for position, words in enumerate(candidate_words):
            cid = f"c{position:0{cand_width}d}"
            candidates.append(Candidate(cid, " ".join(words)))
            g = answer_g if position == answer_position else next(rest_iter)
            scores[(did, cid)] = g

        dialogues.append(Dialogue(
            dialogue_id=did,
            context=tuple(
                Utterance(f"user{i % 3}", " ".join(words))
                for i, words in enumerate(utterances)
            ),
            candidates=tuple(candidates),
            answer_id=answer_id,
        ))
        log.append(PlantRecord(
            dialogue_id=did,
            planted=planted,
            marker_word=marker_word,
            answer_id=answer_id,
            target_rank=target_rank,
        ))

    return dialogues, ScoreTable(scores), log


def write_plant_log(
    log: list[PlantRecord], spec: SynthSpec, path: str | Path
) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("# synthetic corpus plant log\n")
        handle.write("# generator=python-random-mt19937\n")
        spec_json = json.dumps(spec.to_mapping(), sort_keys=True,
                               separators=(",", ":"))
        handle.write(f"# spec={spec_json}\n")
        for record in log:
            handle.write(
                f"{record.dialogue_id}\t{int(record.planted)}"
                f"\t{record.marker_word or '-'}\t{record.answer_id}"
                f"\t{record.target_rank}\n"
            )
