"""Second-pass reranking of per-dialogue candidate lists.

Candidates are first ordered by the generic score G. Dialogues whose
best G clears the bypass threshold keep that order untouched; otherwise
the top-N candidates are rescored with ``S = w_g*G + w_coor*Coor`` and
stably re-sorted, while everything below rank N stays frozen in
baseline order (so the set of top-N candidates never changes).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from typing import Iterable, Mapping

from coorank.coordination import CoordParams, coor_pair
from coorank.corpus_io import (
    Candidate,
    Dialogue,
    RankedRun,
    RunRow,
    ScoreTable,
    round6,
)
from coorank.errors import DataError
from coorank.textnorm import FilterLists, marker_types, normalize
from coorank.vocab_stats import VocabStats


@dataclass(frozen=True)
class RerankConfig:
    w_g: float = 1.0
    w_coor: float = 0.5
    k: float = 1.0
    bypass_threshold: float = 0.99
    top_n: int = 10
    common_cutoff: int = 200

    def __post_init__(self):
        if self.w_g < 0 or self.w_coor < 0:
            raise ValueError("weights must be non-negative")
        if self.w_g + self.w_coor <= 0:
            raise ValueError("at least one weight must be positive")
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if not 0.0 < self.bypass_threshold <= 1.0:
            raise ValueError("bypass_threshold must be in (0,1]")
        if self.top_n < 1:
            raise ValueError("top_n must be at least 1")
        if self.common_cutoff < 0:
            raise ValueError("common_cutoff must be non-negative")

    def coord_params(self) -> CoordParams:
        return CoordParams(k=self.k)

    def to_mapping(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_mapping(cls, mapping: Mapping) -> "RerankConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(mapping) - known)
        if unknown:
            raise DataError(f"unknown config key {unknown[0]!r}")
        return cls(**dict(mapping))


def fuse(g: float, coor: float, cfg: RerankConfig) -> float:
    """Weighted fusion of the generic and coordination scores."""
    return cfg.w_g * g + cfg.w_coor * coor


class PreparedCorpus:
    """Marker-set cache so one corpus can be reranked under many configs.

    Normalization runs once per text; filtered marker sets are memoized
    per filter configuration.
    """

    def __init__(self, corpus: Iterable[Dialogue]):
        self._context_tokens: dict[str, tuple[str, ...]] = {}
        self._candidate_tokens: dict[tuple[str, str], tuple[str, ...]] = {}
        for d in corpus:
            ctx: list[str] = []
            for utterance in d.context:
                ctx.extend(normalize(utterance.text))
            self._context_tokens[d.dialogue_id] = tuple(ctx)
            for cand in d.candidates:
                self._candidate_tokens[(d.dialogue_id, cand.candidate_id)] = (
                    tuple(normalize(cand.text))
                )
        self._marker_cache: dict[tuple, frozenset[str]] = {}

    def context_markers(self, dialogue_id: str,
                        filters: FilterLists) -> frozenset[str]:
        key = ("ctx", dialogue_id, filters)
        if key not in self._marker_cache:
            self._marker_cache[key] = frozenset(
                marker_types(self._context_tokens[dialogue_id], filters)
            )
        return self._marker_cache[key]

    def candidate_markers(self, dialogue_id: str, candidate_id: str,
                          filters: FilterLists) -> frozenset[str]:
        key = ("cand", dialogue_id, candidate_id, filters)
        if key not in self._marker_cache:
            self._marker_cache[key] = frozenset(marker_types(
                self._candidate_tokens[(dialogue_id, candidate_id)], filters
            ))
        return self._marker_cache[key]


def baseline_order(
    dialogue: Dialogue, scores: ScoreTable
) -> list[tuple[Candidate, float]]:
    """Candidates by descending G; input order breaks ties (stable)."""
    try:
        paired = [
            (cand, scores[(dialogue.dialogue_id, cand.candidate_id)])
            for cand in dialogue.candidates
        ]
    except KeyError as exc:
        raise DataError(f"missing generic score for {exc.args[0]}") from None
    return sorted(paired, key=lambda item: -item[1])


def baseline_run(corpus: Iterable[Dialogue], scores: ScoreTable) -> RankedRun:
    """First-pass-only run: ranked by G with S = G and no coordination."""
    entries = {}
    for d in corpus:
        entries[d.dialogue_id] = tuple(
            RunRow(rank, cand.candidate_id, round6(g), round6(g), 0.0)
            for rank, (cand, g) in enumerate(baseline_order(d, scores), 1)
        )
    return RankedRun(entries)


def rerank_dialogue(
    dialogue: Dialogue,
    ordered: list[tuple[Candidate, float]],
    stats: VocabStats,
    filters: FilterLists,
    cfg: RerankConfig,
    prepared: PreparedCorpus | None = None,
    explain: list | None = None,
) -> tuple[RunRow, ...]:
    """Rerank one dialogue's baseline-ordered candidate list.

    ``explain`` collects (dialogue_id, candidate_id, marker, coor_m)
    audit rows for every rescored candidate when provided.
    """
    if not ordered:
        raise DataError(f"dialogue {dialogue.dialogue_id} has no candidates")
    if prepared is None:
        prepared = PreparedCorpus([dialogue])
    did = dialogue.dialogue_id

    if ordered[0][1] > cfg.bypass_threshold:
        return tuple(
            RunRow(rank, cand.candidate_id, round6(cfg.w_g * g), round6(g), 0.0)
            for rank, (cand, g) in enumerate(ordered, 1)
        )

    head = ordered[: cfg.top_n]
    tail = ordered[cfg.top_n:]
    params = cfg.coord_params()
    ctx_markers = prepared.context_markers(did, filters)

    rescored = []
    for cand, g in head:
        cand_markers = prepared.candidate_markers(
            did, cand.candidate_id, filters
        )
        score = coor_pair(ctx_markers, cand_markers, stats, filters, params)
        if explain is not None:
            for marker, value in score.contributing:
                explain.append((did, cand.candidate_id, marker, value))
        rescored.append((cand, g, score.coor, fuse(g, score.coor, cfg)))
    rescored.sort(key=lambda item: -item[3])

    rows = [
        RunRow(rank, cand.candidate_id, round6(s), round6(g), round6(coor))
        for rank, (cand, g, coor, s) in enumerate(rescored, 1)
    ]
    rows.extend(
        RunRow(rank, cand.candidate_id, round6(cfg.w_g * g), round6(g), 0.0)
        for rank, (cand, g) in enumerate(tail, len(rows) + 1)
    )
    return tuple(rows)


def rerank_corpus(
    corpus: Iterable[Dialogue],
    scores: ScoreTable,
    stats: VocabStats,
    filters: FilterLists,
    cfg: RerankConfig,
    prepared: PreparedCorpus | None = None,
    explain: list | None = None,
    threads: int = 1,
) -> RankedRun:
    """Rerank every dialogue; output order follows the input corpus."""
    corpus = list(corpus)
    if prepared is None:
        prepared = PreparedCorpus(corpus)

    def run_one(dialogue: Dialogue):
        local_explain: list | None = [] if explain is not None else None
        rows = rerank_dialogue(
            dialogue, baseline_order(dialogue, scores), stats, filters, cfg,
            prepared=prepared, explain=local_explain,
        )
        return dialogue.dialogue_id, rows, local_explain

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_one, corpus))
    else:
        results = [run_one(d) for d in corpus]

    entries = {}
    for did, rows, local_explain in results:
        entries[did] = rows
        if explain is not None and local_explain:
            explain.extend(local_explain)
    return RankedRun(entries)
