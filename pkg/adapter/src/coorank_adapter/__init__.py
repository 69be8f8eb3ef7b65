"""Score-file producer for coorank corpora.

Reads the dialogue JSONL wire format and emits the score TSV wire
format; the reranking toolkit is consumed only through those files,
never imported.
"""

__version__ = "0.1.0"

from coorank_adapter.corpus import AdapterError, Dialogue, read_corpus
from coorank_adapter.finetune import build_instances
from coorank_adapter.scoring import AdapterConfig, dummy_score, score_corpus

__all__ = [
    "AdapterConfig",
    "AdapterError",
    "Dialogue",
    "build_instances",
    "dummy_score",
    "read_corpus",
    "score_corpus",
]
