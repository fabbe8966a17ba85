"""Character language models over the non-blank symbols plus an end token.

Any object with an ``n_symbols`` attribute and a ``log_probs(history)``
method returning a normalised log-distribution of length ``n_symbols + 1``
(index ``n_symbols`` is the end token) can be used for scoring and fusion.
``history`` is the tuple of symbol ids emitted so far; the start marker is
implicit.
"""

from __future__ import annotations

import math
from collections import defaultdict
from functools import lru_cache
from typing import Iterable, Protocol, Sequence

import numpy as np


class CharLM(Protocol):
    n_symbols: int

    def log_probs(self, history: tuple[int, ...]) -> np.ndarray: ...


class UniformLM:
    """Every symbol and the end token equally likely."""

    def __init__(self, n_symbols: int = 31):
        self.n_symbols = n_symbols
        self._row = np.full(n_symbols + 1, -math.log(n_symbols + 1))

    def log_probs(self, history):
        return self._row


class NGramLM:
    """Add-k smoothed n-gram model with start-padded contexts.

    ``counts`` maps a context (``order - 1`` ids, ``-1`` for the start pad)
    to a count vector over ``n_symbols + 1`` outcomes.
    """

    START = -1

    def __init__(self, order: int, k: float, n_symbols: int, counts=None):
        if order < 1:
            raise ValueError("order must be >= 1")
        if k <= 0:
            raise ValueError("add-k constant must be positive")
        self.order = order
        self.k = float(k)
        self.n_symbols = n_symbols
        self.counts: dict[tuple[int, ...], np.ndarray] = dict(counts or {})
        self._cached = lru_cache(maxsize=65536)(self._log_probs)

    @property
    def end_id(self) -> int:
        return self.n_symbols

    def context(self, history: Sequence[int]) -> tuple[int, ...]:
        n = self.order - 1
        if n == 0:
            return ()
        padded = (self.START,) * n + tuple(history)
        return padded[-n:]

    def _log_probs(self, ctx):
        c = self.counts.get(ctx)
        V = self.n_symbols + 1
        if c is None:
            return np.full(V, -math.log(V))
        return np.log(c + self.k) - math.log(c.sum() + self.k * V)

    def log_probs(self, history):
        return self._cached(self.context(history))

    def count(self, history: Sequence[int], symbol: int) -> float:
        c = self.counts.get(self.context(history))
        return 0.0 if c is None else float(c[symbol])


def train_ngram(corpus: Iterable[Sequence[int]], order: int, k: float, n_symbols: int = 31) -> NGramLM:
    """Count n-grams over each transcript followed by the end token."""
    corpus = [tuple(w) for w in corpus]
    if not corpus:
        raise ValueError("empty training corpus")
    if order < 1:
        raise ValueError("order must be >= 1")
    counts: dict[tuple[int, ...], np.ndarray] = defaultdict(lambda: np.zeros(n_symbols + 1))
    lm = NGramLM(order, k, n_symbols)
    for w in corpus:
        for t, sym in enumerate(tuple(w) + (n_symbols,)):
            if not 0 <= sym <= n_symbols:
                raise ValueError(f"symbol id {sym} out of range")
            counts[lm.context(w[:t])][sym] += 1
    return NGramLM(order, k, n_symbols, counts)


def lm_log_prob(lm: CharLM, w: Sequence[int]) -> float:
    """Chain-rule log-probability of ``w`` followed by the end token."""
    w = tuple(w)
    total = 0.0
    for t, sym in enumerate(w):
        total += float(lm.log_probs(w[:t])[sym])
    return total + float(lm.log_probs(w)[lm.n_symbols])


def perplexity(lm: CharLM, corpus: Iterable[Sequence[int]]) -> float:
    """Per-event perplexity; each transcript contributes ``len(w) + 1`` events
    because the end token is scored."""
    corpus = [tuple(w) for w in corpus]
    if not corpus:
        raise ValueError("empty corpus")
    log_total = sum(lm_log_prob(lm, w) for w in corpus)
    events = sum(len(w) + 1 for w in corpus)
    return math.exp(-log_total / events)
