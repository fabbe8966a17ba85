"""CTC prefix beam search with shallow LM fusion and an insertion penalty.

Each kept prefix carries the log mass of paths ending in blank and of paths
ending in its last symbol. Hypotheses are ranked by

    fused = logaddexp(p_blank, p_nonblank) + lm_weight * lm_log + insertion_penalty * len(prefix)

where ``lm_log`` accumulates LM log-probabilities of the prefix symbols (and
of the end token once decoding finishes).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .lm import CharLM

NEG_INF = -np.inf


@dataclass(frozen=True)
class FusionConfig:
    beam_size: int = 8
    lm_weight: float = 0.0
    insertion_penalty: float = 0.0

    def __post_init__(self):
        if self.beam_size < 1:
            raise ValueError("beam_size must be >= 1")
        if self.lm_weight < 0:
            raise ValueError("lm_weight must be non-negative")


@dataclass(frozen=True)
class BeamHypothesis:
    prefix: tuple[int, ...]
    log_p_blank: float
    log_p_nonblank: float
    lm_log: float
    fused: float

    @property
    def log_p(self) -> float:
        return float(np.logaddexp(self.log_p_blank, self.log_p_nonblank))


def _fused(pb, pnb, lm_log, length, lm_weight, penalty):
    return float(np.logaddexp(pb, pnb)) + lm_weight * lm_log + penalty * length


def prefix_beam_search(
    em: np.ndarray,
    lm: Optional[CharLM] = None,
    config: FusionConfig = FusionConfig(),
    blank: int | None = None,
) -> list[BeamHypothesis]:
    """Run the search and return the final beam, best first."""
    em = np.asarray(em, dtype=float)
    T, K = em.shape
    blank = K - 1 if blank is None else blank
    gamma = config.lm_weight if lm is not None else 0.0
    beta = config.insertion_penalty
    symbols = [k for k in range(K) if k != blank]

    def lm_step(prefix, sym):
        if lm is None:
            return 0.0
        return float(lm.log_probs(prefix)[sym])

    # prefix -> [p_blank, p_nonblank, lm_log]
    beam = {(): [0.0, NEG_INF, 0.0]}
    for t in range(T):
        row = em[t]
        live = [k for k in symbols if row[k] > NEG_INF]
        nxt: dict[tuple[int, ...], list[float]] = {}

        def entry(prefix, lm_log):
            e = nxt.get(prefix)
            if e is None:
                e = nxt[prefix] = [NEG_INF, NEG_INF, lm_log]
            return e

        for prefix, (pb, pnb, lm_log) in beam.items():
            total = np.logaddexp(pb, pnb)
            e = entry(prefix, lm_log)
            e[0] = np.logaddexp(e[0], total + row[blank])
            last = prefix[-1] if prefix else None
            if last is not None and row[last] > NEG_INF:
                # repeated symbol without an intervening blank stays merged
                e[1] = np.logaddexp(e[1], pnb + row[last])
            for k in live:
                new = prefix + (k,)
                src = pb if k == last else total
                if src == NEG_INF:
                    continue
                if new in nxt:
                    ne = nxt[new]
                else:
                    ne = entry(new, lm_log + lm_step(prefix, k))
                ne[1] = np.logaddexp(ne[1], src + row[k])

        ranked = sorted(
            nxt.items(),
            key=lambda kv: (-_fused(kv[1][0], kv[1][1], kv[1][2], len(kv[0]), gamma, beta), kv[0]),
        )
        beam = dict(ranked[: config.beam_size])

    final = []
    for prefix, (pb, pnb, lm_log) in beam.items():
        if lm is not None:
            lm_log += float(lm.log_probs(prefix)[lm.n_symbols])
        final.append(
            BeamHypothesis(prefix, float(pb), float(pnb), lm_log, _fused(pb, pnb, lm_log, len(prefix), gamma, beta))
        )
    final.sort(key=lambda h: (-h.fused, h.prefix))
    return final


def beam_decode(
    em: np.ndarray,
    lm: Optional[CharLM] = None,
    config: FusionConfig = FusionConfig(),
    blank: int | None = None,
) -> tuple[tuple[int, ...], list[tuple[tuple[int, ...], float]]]:
    """Best transcript plus the n-best list of ``(transcript, fused score)``."""
    hyps = prefix_beam_search(em, lm, config, blank)
    nbest = [(h.prefix, h.fused) for h in hyps]
    return hyps[0].prefix, nbest
