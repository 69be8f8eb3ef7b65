"""Toolkit-wide exception types."""


class DataError(ValueError):
    """Invalid or inconsistent input data (corpus, scores, stats, run)."""
