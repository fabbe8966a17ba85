"""Inference for an LSTM decoder with additive temporal attention.

At output step t the decoder embeds the previous symbol (a start token at
the first step), advances its LSTM, attends over the encoder states

    alpha_i = softmax_i(v_d . tanh(W_e e_i + W_d d_t)),   d'_t = sum_i alpha_i e_i

and predicts ``softmax(W_o [d_t; d'_t] + b_o)`` over the symbols plus an
end token. Symbol ids ``0..n-1`` are letters, ``n`` is end and ``n + 1`` is
the start token (embedding table only).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, fields
from typing import Sequence

import numpy as np

from .ctc import log_softmax


def sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


@dataclass(frozen=True)
class LSTMParams:
    """Gate blocks are stacked in the order input, forget, output, candidate."""

    W_x: np.ndarray  # (4H, input)
    W_h: np.ndarray  # (4H, H)
    b: np.ndarray  # (4H,)

    @property
    def hidden_size(self) -> int:
        return self.W_h.shape[1]


@dataclass(frozen=True)
class AttentionParams:
    W_e: np.ndarray  # (A, m)
    W_d: np.ndarray  # (A, H)
    v_d: np.ndarray  # (A,)
    W_o: np.ndarray  # (n + 1, H + m)
    b_o: np.ndarray  # (n + 1,)
    lstm: LSTMParams
    embed: np.ndarray  # (n + 2, input)

    def __post_init__(self):
        H = self.lstm.hidden_size
        A, m = self.W_e.shape
        V = self.b_o.shape[0]
        checks = [
            (self.W_d.shape == (A, H), "W_d"),
            (self.v_d.shape == (A,), "v_d"),
            (self.W_o.shape == (V, H + m), "W_o"),
            (self.lstm.W_h.shape == (4 * H, H), "lstm.W_h"),
            (self.lstm.b.shape == (4 * H,), "lstm.b"),
            (self.lstm.W_x.shape[0] == 4 * H, "lstm.W_x"),
            (self.embed.shape == (V + 1, self.lstm.W_x.shape[1]), "embed"),
        ]
        for ok, name in checks:
            if not ok:
                raise ValueError(f"inconsistent shape for {name}")

    @property
    def n_symbols(self) -> int:
        return self.b_o.shape[0] - 1

    @property
    def end_id(self) -> int:
        return self.n_symbols

    @property
    def start_id(self) -> int:
        return self.n_symbols + 1

    @property
    def hidden_size(self) -> int:
        return self.lstm.hidden_size

    def tensors(self) -> dict[str, np.ndarray]:
        out = {}
        for f in fields(self):
            if f.name == "lstm":
                for g in fields(self.lstm):
                    out[f"lstm.{g.name}"] = getattr(self.lstm, g.name)
            else:
                out[f.name] = getattr(self, f.name)
        return out

    @classmethod
    def from_tensors(cls, t: dict[str, np.ndarray]) -> "AttentionParams":
        lstm = LSTMParams(t["lstm.W_x"], t["lstm.W_h"], t["lstm.b"])
        return cls(t["W_e"], t["W_d"], t["v_d"], t["W_o"], t["b_o"], lstm, t["embed"])

    @classmethod
    def random(cls, rng, n_symbols, feat_dim, hidden=8, attn=6, embed_dim=5, scale=0.5):
        def r(*shape):
            return scale * rng.standard_normal(shape)

        lstm = LSTMParams(r(4 * hidden, embed_dim), r(4 * hidden, hidden), r(4 * hidden))
        return cls(
            r(attn, feat_dim), r(attn, hidden), r(attn),
            r(n_symbols + 1, hidden + feat_dim), r(n_symbols + 1),
            lstm, r(n_symbols + 2, embed_dim),
        )

    @classmethod
    def zeros(cls, n_symbols, feat_dim, hidden=4, attn=3, embed_dim=3):
        z = np.zeros
        lstm = LSTMParams(z((4 * hidden, embed_dim)), z((4 * hidden, hidden)), z(4 * hidden))
        return cls(
            z((attn, feat_dim)), z((attn, hidden)), z(attn),
            z((n_symbols + 1, hidden + feat_dim)), z(n_symbols + 1),
            lstm, z((n_symbols + 2, embed_dim)),
        )


@dataclass(frozen=True)
class DecoderState:
    hidden: np.ndarray
    cell: np.ndarray

    @classmethod
    def zeros(cls, size: int) -> "DecoderState":
        return cls(np.zeros(size), np.zeros(size))


def lstm_step(state: DecoderState, x: np.ndarray, params: LSTMParams) -> DecoderState:
    H = params.hidden_size
    x = np.asarray(x, dtype=float)
    if x.shape != (params.W_x.shape[1],) or state.hidden.shape != (H,) or state.cell.shape != (H,):
        raise ValueError("LSTM input or state has the wrong shape")
    z = params.W_x @ x + params.W_h @ state.hidden + params.b
    i, f, o = sigmoid(z[:H]), sigmoid(z[H:2 * H]), sigmoid(z[2 * H:3 * H])
    g = np.tanh(z[3 * H:])
    cell = f * state.cell + i * g
    return DecoderState(o * np.tanh(cell), cell)


def attend(encoder_states: np.ndarray, d_t: np.ndarray, params: AttentionParams):
    """Attention weights over frames and the resulting context vector."""
    enc = np.atleast_2d(np.asarray(encoder_states, dtype=float))
    if enc.shape[0] < 1:
        raise ValueError("need at least one encoder state")
    scores = np.tanh(enc @ params.W_e.T + params.W_d @ d_t) @ params.v_d
    alpha = np.exp(log_softmax(scores))
    return alpha, alpha @ enc


def step_distribution(d_t: np.ndarray, context: np.ndarray, params: AttentionParams) -> np.ndarray:
    """Log-distribution over the symbols plus the end token."""
    x = np.concatenate([d_t, context])
    if x.shape != (params.W_o.shape[1],):
        raise ValueError(f"[d_t; context] has length {x.shape[0]}, expected {params.W_o.shape[1]}")
    return log_softmax(params.W_o @ x + params.b_o)


def _advance(enc, state, prev_symbol, params):
    state = lstm_step(state, params.embed[prev_symbol], params.lstm)
    _, context = attend(enc, state.hidden, params)
    return state, step_distribution(state.hidden, context, params)


def step_log_probs(encoder_states, w: Sequence[int], params: AttentionParams) -> list[float]:
    """Per-step log-probabilities of ``w`` followed by the end token."""
    enc = np.atleast_2d(np.asarray(encoder_states, dtype=float))
    state = DecoderState.zeros(params.hidden_size)
    prev = params.start_id
    out = []
    for sym in tuple(w) + (params.end_id,):
        state, logp = _advance(enc, state, prev, params)
        out.append(float(logp[sym]))
        prev = sym
    return out


def sequence_log_prob(encoder_states, w: Sequence[int], params: AttentionParams) -> float:
    return float(sum(step_log_probs(encoder_states, w, params)))


def decode(encoder_states, params: AttentionParams, beam_size: int = 1, max_len: int | None = None):
    """Beam search until every kept hypothesis has emitted the end token.

    Hypotheses reaching ``max_len`` symbols (default ``2T``) are closed with
    the end-token probability. Returns ``(transcript, log_prob)``.
    """
    if beam_size < 1:
        raise ValueError("beam_size must be >= 1")
    enc = np.atleast_2d(np.asarray(encoder_states, dtype=float))
    if max_len is None:
        max_len = 2 * enc.shape[0]
    end = params.end_id

    # (score, prefix, state)
    beam = [(0.0, (), DecoderState.zeros(params.hidden_size))]
    finished: list[tuple[float, tuple[int, ...]]] = []
    while beam:
        cands = []
        for score, prefix, state in beam:
            prev = prefix[-1] if prefix else params.start_id
            new_state, logp = _advance(enc, state, prev, params)
            if len(prefix) == max_len:
                finished.append((score + float(logp[end]), prefix))
                continue
            for k in range(len(logp)):
                cands.append((score + float(logp[k]), prefix, k, new_state))
        top = heapq.nsmallest(beam_size, cands, key=lambda c: (-c[0], c[1] + (c[2],)))
        beam = []
        for score, prefix, k, state in top:
            if k == end:
                finished.append((score, prefix))
            else:
                beam.append((score, prefix + (k,), state))
        # scores only decrease, so a finished hypothesis above every open one is final
        if finished and beam:
            best_done = max(s for s, _ in finished)
            if best_done >= max(s for s, _, _ in beam):
                break
    best = min(finished, key=lambda f: (-f[0], f[1]))
    return best[1], best[0]
