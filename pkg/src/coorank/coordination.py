"""Per-marker and per-pair lexical coordination scoring.

A marker shared by context and candidate earns credit inversely related
to how routinely that marker shows up on the response side of the
statistics corpus: rare-in-responses overlap is strong coordination.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import AbstractSet

from coorank.textnorm import CATEGORY_TOKENS, FilterLists
from coorank.vocab_stats import VocabStats


@dataclass(frozen=True)
class CoordParams:
    k: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"k must be non-negative, got {self.k}")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")


@dataclass(frozen=True)
class CoordinationScore:
    """Average coordination plus the per-marker audit trail behind it."""

    coor: float
    contributing: tuple[tuple[str, float], ...]


def response_probability(
    marker: str, stats: VocabStats, alpha: float = 1.0
) -> float:
    """Smoothed share of the marker's use that occurs in responses.

    Additive smoothing keeps the value in (0,1] and sends markers absent
    from the statistics corpus to 1, so out-of-corpus noise never earns
    coordination credit at k >= 1.
    """
    total = stats.count_total.get(marker, 0)
    resp = stats.count_response.get(marker, 0)
    return (resp + alpha) / (total + alpha)


def coor_marker(marker: str, stats: VocabStats, params: CoordParams) -> float:
    """Coordination credit for one overlapping marker, clamped to [0,1]."""
    p = response_probability(marker, stats, params.alpha)
    return max(0.0, 1.0 - params.k * p)


def coor_pair(
    context_markers: AbstractSet[str],
    candidate_markers: AbstractSet[str],
    stats: VocabStats,
    filters: FilterLists,
    params: CoordParams,
) -> CoordinationScore:
    """Average coordination over the overlapping, unfiltered markers.

    Zero-valued per-marker scores are excluded from the average; an
    empty or fully clamped overlap scores 0.
    """
    overlap = set(context_markers) & set(candidate_markers)
    overlap -= CATEGORY_TOKENS
    overlap -= filters.ignore_set
    contributing = []
    for marker in sorted(overlap):
        value = coor_marker(marker, stats, params)
        if value > 0.0:
            contributing.append((marker, value))
    if contributing:
        coor = sum(v for _, v in contributing) / len(contributing)
    else:
        coor = 0.0
    return CoordinationScore(coor=coor, contributing=tuple(contributing))
