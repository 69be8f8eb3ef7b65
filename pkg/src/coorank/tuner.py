"""Exhaustive grid search over reranking parameters on a dev split.

The objective is R@1 with ties broken by MRR, then smaller w_coor, then
smaller k, then earlier grid position. Candidate marker overlaps are
precomputed once per common-word cutoff so the whole default grid stays
cheap; the resulting scores are bit-identical to running the reranker
directly (the same float expressions are evaluated in the same order).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Mapping

from coorank.coordination import response_probability
from coorank.corpus_io import Dialogue, ScoreTable
from coorank.errors import DataError
from coorank.reranker import PreparedCorpus, RerankConfig, baseline_order
from coorank.textnorm import CATEGORY_TOKENS, FilterLists
from coorank.vocab_stats import VocabStats, common_words


@dataclass(frozen=True)
class TuneSpec:
    w_g: tuple[float, ...] = (1.0,)
    w_coor: tuple[float, ...] = tuple(round(0.05 * i, 2) for i in range(21))
    k: tuple[float, ...] = (0.5, 1.0, 2.0, 5.0, 10.0, 50.0)
    bypass_threshold: tuple[float, ...] = (0.95, 0.99, 0.999, 1.0)
    common_cutoff: tuple[int, ...] = (0, 100, 200, 400)
    top_n: int = 10

    def __post_init__(self):
        for name in ("w_g", "w_coor", "k", "bypass_threshold",
                     "common_cutoff"):
            if not getattr(self, name):
                raise ValueError(f"empty grid for {name}")
        if 1.0 not in self.w_g or 0.0 not in self.w_coor:
            raise ValueError(
                "the weight grid must include the baseline point "
                "(w_g=1, w_coor=0)"
            )

    @property
    def n_points(self) -> int:
        return (len(self.w_g) * len(self.w_coor) * len(self.k)
                * len(self.bypass_threshold) * len(self.common_cutoff))

    @classmethod
    def from_mapping(cls, mapping: Mapping) -> "TuneSpec":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(mapping) - known)
        if unknown:
            raise DataError(f"unknown grid key {unknown[0]!r}")
        kwargs = {
            key: tuple(value) if isinstance(value, (list, tuple)) else value
            for key, value in mapping.items()
        }
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path: str | Path) -> "TuneSpec":
        path = Path(path)
        try:
            with open(path, encoding="utf-8") as handle:
                mapping = json.load(handle)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid grid file ({exc.msg})") from None
        if not isinstance(mapping, dict):
            raise DataError(f"{path}: grid file must be a JSON object")
        try:
            return cls.from_mapping(mapping)
        except (ValueError, TypeError) as exc:
            raise DataError(f"{path}: {exc}") from None


@dataclass(frozen=True)
class TunePoint:
    config: RerankConfig
    r1: float
    mrr: float


class _PreparedDialogue:
    __slots__ = ("g_values", "answer_index", "max_g", "overlap_p")

    def __init__(self, g_values, answer_index, max_g):
        self.g_values = g_values
        self.answer_index = answer_index
        self.max_g = max_g
        # per cutoff: per baseline position, response probabilities of the
        # overlapping markers (sorted by marker, mirroring coor_pair)
        self.overlap_p: dict[int, list[list[float]]] = {}


def _prepare(dev_corpus, dev_scores, stats, filters, spec):
    prepared_markers = PreparedCorpus(dev_corpus)
    dialogues = []
    for d in dev_corpus:
        if d.answer_id is None:
            raise DataError(
                f"dev dialogue {d.dialogue_id!r} has no answer; tuning "
                "needs a labelled split"
            )
        ordered = baseline_order(d, dev_scores)
        g_values = [g for _, g in ordered]
        answer_index = next(
            i for i, (cand, _) in enumerate(ordered)
            if cand.candidate_id == d.answer_id
        )
        dialogues.append(
            (d, ordered, _PreparedDialogue(g_values, answer_index,
                                           g_values[0]))
        )

    for cutoff in dict.fromkeys(spec.common_cutoff):
        cut_filters = filters.with_common_words(common_words(stats, cutoff))
        ignore = cut_filters.ignore_set
        for d, ordered, slot in dialogues:
            ctx = prepared_markers.context_markers(d.dialogue_id, cut_filters)
            per_candidate = []
            for cand, _ in ordered[: spec.top_n]:
                cand_markers = prepared_markers.candidate_markers(
                    d.dialogue_id, cand.candidate_id, cut_filters
                )
                overlap = (set(ctx) & set(cand_markers))
                overlap -= CATEGORY_TOKENS
                overlap -= ignore
                per_candidate.append([
                    response_probability(m, stats) for m in sorted(overlap)
                ])
            slot.overlap_p[cutoff] = per_candidate
    return [slot for _, _, slot in dialogues]


def _answer_rank(slot: _PreparedDialogue, coor: list[float],
                 cfg: RerankConfig) -> int:
    """Answer rank under one config, mirroring the reranker exactly."""
    if slot.max_g > cfg.bypass_threshold:
        return slot.answer_index + 1
    a = slot.answer_index
    if a >= cfg.top_n:
        return a + 1
    g = slot.g_values
    head_n = min(cfg.top_n, len(g))
    s_answer = cfg.w_g * g[a] + cfg.w_coor * coor[a]
    rank = 1
    for j in range(head_n):
        if j == a:
            continue
        s_j = cfg.w_g * g[j] + cfg.w_coor * coor[j]
        if s_j > s_answer or (s_j == s_answer and j < a):
            rank += 1
    return rank


def tune(
    dev_corpus: Iterable[Dialogue],
    dev_scores: ScoreTable,
    stats: VocabStats,
    filters: FilterLists,
    spec: TuneSpec | None = None,
) -> tuple[RerankConfig, list[TunePoint]]:
    """Evaluate every grid point on the dev split and return the argmax."""
    spec = spec or TuneSpec()
    dev_corpus = list(dev_corpus)
    if not dev_corpus:
        raise DataError("empty dev corpus")
    slots = _prepare(dev_corpus, dev_scores, stats, filters, spec)
    n = len(slots)

    trace: list[TunePoint] = []
    best: TunePoint | None = None
    best_key: tuple | None = None
    for cutoff in spec.common_cutoff:
        for k in spec.k:
            coor_per_slot = []
            for slot in slots:
                coor = []
                for p_values in slot.overlap_p[cutoff]:
                    contributing = [
                        value for value in
                        (max(0.0, 1.0 - k * p) for p in p_values)
                        if value > 0.0
                    ]
                    coor.append(
                        sum(contributing) / len(contributing)
                        if contributing else 0.0
                    )
                coor_per_slot.append(coor)
            for w_g in spec.w_g:
                for w_coor in spec.w_coor:
                    for bypass in spec.bypass_threshold:
                        cfg = RerankConfig(
                            w_g=w_g, w_coor=w_coor, k=k,
                            bypass_threshold=bypass, top_n=spec.top_n,
                            common_cutoff=cutoff,
                        )
                        hits = 0
                        reciprocal = 0.0
                        for slot, coor in zip(slots, coor_per_slot):
                            rank = _answer_rank(slot, coor, cfg)
                            if rank == 1:
                                hits += 1
                            reciprocal += 1.0 / rank
                        point = TunePoint(
                            config=cfg,
                            r1=100.0 * hits / n,
                            mrr=reciprocal / n,
                        )
                        trace.append(point)
                        key = (point.r1, point.mrr, -w_coor, -k)
                        if best_key is None or key > best_key:
                            best, best_key = point, key
    assert best is not None
    return best.config, trace
