"""Letter accuracy, substitution statistics and frame-rate bucketing."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Iterable, Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class AlignmentCounts:
    S: int
    I: int
    D: int
    N: int

    @property
    def errors(self) -> int:
        return self.S + self.I + self.D


@dataclass(frozen=True)
class EvalRecord:
    id: str
    reference: tuple
    hypothesis: tuple
    fps: Optional[float] = None

    def __post_init__(self):
        if len(self.reference) == 0:
            raise ValueError(f"record {self.id}: empty reference")
        object.__setattr__(self, "reference", tuple(self.reference))
        object.__setattr__(self, "hypothesis", tuple(self.hypothesis))


def edit_table(ref: Sequence, hyp: Sequence) -> np.ndarray:
    n, m = len(ref), len(hyp)
    d = np.zeros((n + 1, m + 1), dtype=int)
    d[:, 0] = np.arange(n + 1)
    d[0, :] = np.arange(m + 1)
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            d[i, j] = min(
                d[i - 1, j - 1] + (ref[i - 1] != hyp[j - 1]),
                d[i - 1, j] + 1,
                d[i, j - 1] + 1,
            )
    return d


def align(ref: Sequence[Hashable], hyp: Sequence[Hashable]):
    """Minimum edit-distance alignment with unit costs.

    Returns ``(counts, pairs)`` where ``pairs`` lists ``(ref_symbol,
    hyp_symbol)`` in order, with ``None`` on the missing side of an insertion
    or deletion. On equal cost the backtrace prefers match, then
    substitution, then deletion, then insertion.
    """
    if len(ref) == 0:
        raise ValueError("empty reference: accuracy undefined")
    d = edit_table(ref, hyp)
    i, j = len(ref), len(hyp)
    pairs = []
    S = I = D = 0
    while i > 0 or j > 0:
        if i > 0 and j > 0 and d[i, j] == d[i - 1, j - 1] + (ref[i - 1] != hyp[j - 1]):
            if ref[i - 1] != hyp[j - 1]:
                S += 1
            pairs.append((ref[i - 1], hyp[j - 1]))
            i, j = i - 1, j - 1
        elif i > 0 and d[i, j] == d[i - 1, j] + 1:
            D += 1
            pairs.append((ref[i - 1], None))
            i -= 1
        else:
            I += 1
            pairs.append((None, hyp[j - 1]))
            j -= 1
    pairs.reverse()
    return AlignmentCounts(S, I, D, len(ref)), pairs


def letter_accuracy(records: Iterable[EvalRecord]) -> float:
    """1 - (S + I + D) / N with counts pooled over all records."""
    records = list(records)
    if not records:
        raise ValueError("no records")
    errors = total = 0
    for r in records:
        c, _ = align(r.reference, r.hypothesis)
        errors += c.errors
        total += c.N
    return 1.0 - errors / total


def total_counts(records: Iterable[EvalRecord]) -> AlignmentCounts:
    S = I = D = N = 0
    for r in records:
        c, _ = align(r.reference, r.hypothesis)
        S, I, D, N = S + c.S, I + c.I, D + c.D, N + c.N
    return AlignmentCounts(S, I, D, N)


def confusion_stats(records: Iterable[EvalRecord]) -> dict[tuple, float]:
    """Percentage of occurrences of each reference symbol aligned to each
    different hypothesis symbol. Only substitution pairs appear."""
    records = list(records)
    if not records:
        raise ValueError("no records")
    ref_counts: Counter = Counter()
    subs: Counter = Counter()
    for r in records:
        ref_counts.update(r.reference)
        _, pairs = align(r.reference, r.hypothesis)
        for a, b in pairs:
            if a is not None and b is not None and a != b:
                subs[(a, b)] += 1
    return {pair: 100.0 * n / ref_counts[pair[0]] for pair, n in subs.items()}


def bucket_by_fps(records: Iterable[EvalRecord], bucket_edges: Sequence[float]):
    """Accuracy per frame-rate bucket.

    The edges split the real line into ``[-inf, e1), [e1, e2), ..., [en, inf)``.
    Returns ``(lo, hi, accuracy, n_records)`` for each non-empty bucket in
    increasing order.
    """
    edges = [float(e) for e in bucket_edges]
    if any(b <= a for a, b in zip(edges, edges[1:])):
        raise ValueError("bucket edges must be strictly increasing")
    bounds = [-math.inf] + edges + [math.inf]
    groups: dict[int, list[EvalRecord]] = {}
    for r in records:
        if r.fps is None:
            raise ValueError(f"record {r.id} has no fps tag")
        idx = int(np.searchsorted(edges, r.fps, side="right"))
        groups.setdefault(idx, []).append(r)
    return [
        (bounds[i], bounds[i + 1], letter_accuracy(groups[i]), len(groups[i]))
        for i in sorted(groups)
    ]
