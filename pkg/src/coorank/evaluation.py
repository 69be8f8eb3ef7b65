"""Ranking metrics and before/after run comparison.

All evaluated dialogues must carry an answer; recall values are
percentages, MRR stays in (0,1] internally and is scaled to a
percentage only for display.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from coorank.coordination import CoordParams, coor_pair
from coorank.corpus_io import Dialogue, RankedRun
from coorank.errors import DataError
from coorank.textnorm import FilterLists, marker_types, normalize
from coorank.vocab_stats import VocabStats


@dataclass(frozen=True)
class EvalReport:
    recall_at: dict[int, float]
    mrr: float
    n_dialogues: int
    position_histogram: dict[int, float]

    def to_dict(self) -> dict:
        return {
            "n_dialogues": self.n_dialogues,
            "recall_at": {str(k): v for k, v in self.recall_at.items()},
            "mrr": self.mrr,
            "position_histogram": {
                str(r): v for r, v in self.position_histogram.items()
            },
        }


@dataclass(frozen=True)
class DiffReport:
    cap: int
    corrections: int
    new_errors: int

    def to_dict(self) -> dict:
        return {
            "cap": self.cap,
            "corrections": self.corrections,
            "new_errors": self.new_errors,
        }


def _answer_ranks(run: RankedRun, corpus: Iterable[Dialogue]) -> dict[str, int]:
    by_id = {d.dialogue_id: d for d in corpus}
    ranks: dict[str, int] = {}
    for did in run.dialogue_ids():
        dialogue = by_id.get(did)
        if dialogue is None:
            raise DataError(f"run dialogue {did!r} missing from corpus")
        if dialogue.answer_id is None:
            raise DataError(f"dialogue {did!r} has no answer; exclude it "
                            "before evaluating")
        ranks[did] = run.answer_rank(dialogue)
    return ranks


def evaluate(
    run: RankedRun,
    corpus: Iterable[Dialogue],
    ks: Sequence[int] = (1, 10),
) -> EvalReport:
    """Recall@k, MRR, and the answer-position histogram for one run."""
    if len(run) == 0:
        raise DataError("cannot evaluate an empty run")
    if any(k < 1 for k in ks):
        raise ValueError("recall cutoffs must be positive")
    ranks = list(_answer_ranks(run, corpus).values())
    n = len(ranks)
    recall_at = {
        k: 100.0 * sum(1 for r in ranks if r <= k) / n for k in sorted(set(ks))
    }
    mrr = sum(1.0 / r for r in ranks) / n
    histogram = {
        r: 100.0 * sum(1 for x in ranks if x == r) / n
        for r in range(1, max([3, *ranks]) + 1)
    }
    return EvalReport(
        recall_at=recall_at,
        mrr=mrr,
        n_dialogues=n,
        position_histogram=histogram,
    )


def diff_runs(
    baseline: RankedRun,
    reranked: RankedRun,
    corpus: Iterable[Dialogue],
    stats: VocabStats,
    filters: FilterLists,
    params: CoordParams,
) -> DiffReport:
    """Cap / corrections / new errors of a reranked run vs its baseline.

    Over baseline errors (answer not at rank 1): ``cap`` counts those
    whose answer shows positive coordination with the context, and
    ``corrections`` counts those fixed by the rerank. ``new_errors``
    counts baseline successes broken by the rerank.
    """
    corpus = list(corpus)
    if set(baseline.dialogue_ids()) != set(reranked.dialogue_ids()):
        raise DataError("baseline and reranked runs cover different dialogues")
    base_ranks = _answer_ranks(baseline, corpus)
    new_ranks = _answer_ranks(reranked, corpus)

    by_id = {d.dialogue_id: d for d in corpus}
    cap = corrections = new_errors = 0
    for did, base_rank in base_ranks.items():
        if base_rank == 1:
            if new_ranks[did] != 1:
                new_errors += 1
            continue
        dialogue = by_id[did]
        context_markers: set[str] = set()
        for utterance in dialogue.context:
            context_markers |= marker_types(normalize(utterance.text), filters)
        answer = dialogue.answer
        assert answer is not None  # enforced by _answer_ranks
        answer_markers = marker_types(normalize(answer.text), filters)
        score = coor_pair(context_markers, answer_markers, stats, filters,
                          params)
        if score.coor > 0.0:
            cap += 1
        if new_ranks[did] == 1:
            corrections += 1

    n_base_errors = sum(1 for r in base_ranks.values() if r != 1)
    assert corrections <= n_base_errors
    assert new_errors <= len(base_ranks) - n_base_errors
    return DiffReport(cap=cap, corrections=corrections, new_errors=new_errors)


def _format_table(header: list[str], rows: list[list[str]]) -> str:
    widths = [
        max(len(str(cell)) for cell in column)
        for column in zip(header, *rows)
    ] if rows else [len(h) for h in header]
    lines = []
    for row in [header] + rows:
        cells = [
            str(cell).ljust(w) if i == 0 else str(cell).rjust(w)
            for i, (cell, w) in enumerate(zip(row, widths))
        ]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def render_eval_table(reports: list[tuple[str, EvalReport]]) -> str:
    """Fixed-width metric table, one column per labelled run."""
    header = ["metric"] + [label for label, _ in reports]
    rows = []
    ks = sorted({k for _, r in reports for k in r.recall_at})
    for k in ks:
        rows.append(
            [f"R@{k}"] + [
                f"{report.recall_at.get(k, 0.0):.2f}" for _, report in reports
            ]
        )
    if reports:
        rows.append(["MRR"] + [f"{100.0 * r.mrr:.2f}" for _, r in reports])
    return _format_table(header, rows)


def render_position_table(
    reports: list[tuple[str, EvalReport]], max_rank: int = 3
) -> str:
    """Answer-position distribution (percent of dialogues per rank)."""
    header = ["rank"] + [label for label, _ in reports]
    rows = [
        [str(rank)] + [
            f"{report.position_histogram.get(rank, 0.0):.2f}"
            for _, report in reports
        ]
        for rank in range(1, max_rank + 1)
    ]
    return _format_table(header, rows)


def render_diff_table(diff: DiffReport) -> str:
    return _format_table(
        ["case", "count"],
        [
            ["cap", str(diff.cap)],
            ["correction", str(diff.corrections)],
            ["new_error", str(diff.new_errors)],
        ],
    )
