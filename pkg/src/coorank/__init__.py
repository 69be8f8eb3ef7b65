"""Rerank N-best dialogue response candidates by lexical coordination.

A first-pass model's scores are fused with a rarity-weighted
word-overlap score between the dialogue context and each candidate;
see :class:`coorank.estimator.CoordinationReranker` for the estimator
API and ``coorank --help`` for the CLI.
"""

__version__ = "0.1.0"

from coorank.coordination import CoordParams, coor_marker, coor_pair
from coorank.corpus_io import (
    Candidate,
    Dialogue,
    RankedRun,
    RunRow,
    ScoreTable,
    Utterance,
    load_corpus,
    load_run,
    load_scores,
    write_corpus,
    write_run,
    write_scores,
)
from coorank.errors import DataError
from coorank.estimator import CoordinationReranker
from coorank.evaluation import DiffReport, EvalReport, diff_runs, evaluate
from coorank.reranker import RerankConfig, baseline_run, rerank_corpus
from coorank.textnorm import FilterLists, marker_types, normalize
from coorank.tuner import TuneSpec, tune
from coorank.vocab_stats import VocabStats, build_stats, common_words

__all__ = [
    "Candidate",
    "CoordParams",
    "CoordinationReranker",
    "DataError",
    "DiffReport",
    "Dialogue",
    "EvalReport",
    "FilterLists",
    "RankedRun",
    "RerankConfig",
    "RunRow",
    "ScoreTable",
    "TuneSpec",
    "Utterance",
    "VocabStats",
    "baseline_run",
    "build_stats",
    "common_words",
    "coor_marker",
    "coor_pair",
    "diff_runs",
    "evaluate",
    "load_corpus",
    "load_run",
    "load_scores",
    "marker_types",
    "normalize",
    "rerank_corpus",
    "tune",
    "write_corpus",
    "write_run",
    "write_scores",
]
