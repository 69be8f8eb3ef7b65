"""Estimator-style front door around the functional core.

``CoordinationReranker`` follows the scikit-learn conventions: all
hyper-parameters are constructor arguments (so ``get_params`` /
``set_params`` / ``clone`` work), ``fit`` learns marker statistics from
a statistics corpus, and reranking is available until then only behind
a fitted-check.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from coorank.corpus_io import Dialogue, RankedRun, ScoreTable
from coorank.reranker import RerankConfig, rerank_corpus
from coorank.textnorm import FilterLists
from coorank.vocab_stats import build_stats, common_words


class CoordinationReranker(BaseEstimator):
    """Rerank N-best candidate lists by lexical coordination.

    Parameters mirror :class:`coorank.reranker.RerankConfig`;
    ``filters`` carries the base ignore lists (bundled English lists
    when None) and the fitted common-word list is added on top.
    """

    def __init__(
        self,
        w_g: float = 1.0,
        w_coor: float = 0.5,
        k: float = 1.0,
        bypass_threshold: float = 0.99,
        top_n: int = 10,
        common_cutoff: int = 200,
        filters: FilterLists | None = None,
    ):
        self.w_g = w_g
        self.w_coor = w_coor
        self.k = k
        self.bypass_threshold = bypass_threshold
        self.top_n = top_n
        self.common_cutoff = common_cutoff
        self.filters = filters

    def _config(self) -> RerankConfig:
        return RerankConfig(
            w_g=self.w_g,
            w_coor=self.w_coor,
            k=self.k,
            bypass_threshold=self.bypass_threshold,
            top_n=self.top_n,
            common_cutoff=self.common_cutoff,
        )

    def fit(
        self,
        X: Iterable[Dialogue],
        y=None,
        extra_responses: Mapping[str, Sequence[str]] | None = None,
    ) -> "CoordinationReranker":
        """Learn marker statistics from a statistics corpus."""
        self._config()  # surface invalid hyper-parameters early
        base = self.filters if self.filters is not None else FilterLists.bundled()
        self.stats_ = build_stats(X, extra_responses)
        self.filters_ = base.with_common_words(
            common_words(self.stats_, self.common_cutoff)
        )
        return self

    def rerank(
        self,
        corpus: Iterable[Dialogue],
        scores: ScoreTable,
        threads: int = 1,
        explain: list | None = None,
    ) -> RankedRun:
        check_is_fitted(self, "stats_")
        return rerank_corpus(
            corpus, scores, self.stats_, self.filters_, self._config(),
            explain=explain, threads=threads,
        )

    def predict(
        self, corpus: Iterable[Dialogue], scores: ScoreTable
    ) -> list[str]:
        """Top-ranked candidate id per dialogue, in corpus order."""
        corpus = list(corpus)
        run = self.rerank(corpus, scores)
        return [run[d.dialogue_id][0].candidate_id for d in corpus]
