"""CTC emission layer, labelling probabilities and loss gradient.

Emission matrices are ``(T, K)`` arrays of per-frame log-probabilities whose
last column is the blank unless ``blank`` says otherwise. All sums run in log
space; impossible events are ``-inf``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .alphabet import collapse, min_frames

NEG_INF = -np.inf


class InfeasibleTranscriptError(ValueError):
    """The transcript cannot be produced by any path of the given length."""


def _blank(em: np.ndarray, blank: int | None) -> int:
    return em.shape[1] - 1 if blank is None else blank


def log_softmax(logits: np.ndarray) -> np.ndarray:
    logits = np.asarray(logits, dtype=float)
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    return shifted - np.log(np.sum(np.exp(shifted), axis=-1, keepdims=True))


def emissions(features: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Row-wise ``log_softmax(weight @ e_t + bias)`` for a ``(T, m)`` feature
    array, ``weight`` of shape ``(K, m)`` and ``bias`` of length ``K``."""
    features = np.atleast_2d(np.asarray(features, dtype=float))
    weight = np.asarray(weight, dtype=float)
    bias = np.asarray(bias, dtype=float)
    if weight.ndim != 2 or weight.shape[1] != features.shape[1]:
        raise ValueError(
            f"feature dimension {features.shape[1]} does not match weight {weight.shape}"
        )
    if bias.shape != (weight.shape[0],):
        raise ValueError(f"bias shape {bias.shape} does not match weight {weight.shape}")
    return log_softmax(features @ weight.T + bias)


def check_emissions(em: np.ndarray, atol: float = 1e-9) -> np.ndarray:
    em = np.asarray(em, dtype=float)
    if em.ndim != 2 or em.shape[0] < 1:
        raise ValueError(f"emission matrix must be (T, K) with T >= 1, got {em.shape}")
    norms = logsumexp(em, axis=1)
    if not np.allclose(norms, 0.0, atol=atol):
        raise ValueError("emission rows are not normalised log-distributions")
    return em


def path_log_prob(em: np.ndarray, path: Sequence[int]) -> float:
    if len(path) != em.shape[0]:
        raise ValueError(f"path length {len(path)} != T={em.shape[0]}")
    return float(np.sum(em[np.arange(len(path)), np.asarray(path, dtype=int)]))


def _extended(labels: Sequence[int], blank: int) -> np.ndarray:
    ext = np.full(2 * len(labels) + 1, blank, dtype=int)
    ext[1::2] = labels
    return ext


def _skip_mask(ext: np.ndarray, blank: int) -> np.ndarray:
    """Positions s that may be entered directly from s-2."""
    mask = np.zeros(len(ext), dtype=bool)
    mask[2:] = (ext[2:] != blank) & (ext[2:] != ext[:-2])
    return mask


def forward(em: np.ndarray, labels: Sequence[int], blank: int | None = None) -> np.ndarray:
    """Log forward variables over the blank-interleaved label sequence, (T, 2s+1)."""
    blank = _blank(em, blank)
    ext = _extended(labels, blank)
    skip = _skip_mask(ext, blank)
    T, S = em.shape[0], len(ext)
    alpha = np.full((T, S), NEG_INF)
    alpha[0, 0] = em[0, ext[0]]
    if S > 1:
        alpha[0, 1] = em[0, ext[1]]
    for t in range(1, T):
        prev = alpha[t - 1]
        a = prev.copy()
        a[1:] = np.logaddexp(a[1:], prev[:-1])
        a[2:] = np.where(skip[2:], np.logaddexp(a[2:], prev[:-2]), a[2:])
        alpha[t] = a + em[t, ext]
    return alpha


def backward(em: np.ndarray, labels: Sequence[int], blank: int | None = None) -> np.ndarray:
    """Log backward variables; ``beta[t, s]`` includes the emission at ``t``."""
    blank = _blank(em, blank)
    ext = _extended(labels, blank)
    skip = _skip_mask(ext, blank)
    T, S = em.shape[0], len(ext)
    beta = np.full((T, S), NEG_INF)
    beta[T - 1, S - 1] = em[T - 1, ext[S - 1]]
    if S > 1:
        beta[T - 1, S - 2] = em[T - 1, ext[S - 2]]
    for t in range(T - 2, -1, -1):
        nxt = beta[t + 1]
        b = nxt.copy()
        b[:-1] = np.logaddexp(b[:-1], nxt[1:])
        b[:-2] = np.where(skip[2:], np.logaddexp(b[:-2], nxt[2:]), b[:-2])
        beta[t] = b + em[t, ext]
    return beta


def label_log_prob(em: np.ndarray, labels: Sequence[int], blank: int | None = None) -> float:
    """log p(labels | frames), summing over every path that collapses to it.

    Returns ``-inf`` when the transcript needs more frames than are available.
    """
    em = np.asarray(em, dtype=float)
    if min_frames(labels) > em.shape[0]:
        return NEG_INF
    alpha = forward(em, labels, blank)
    if len(labels) == 0:
        return float(alpha[-1, -1])
    return float(np.logaddexp(alpha[-1, -1], alpha[-1, -2]))


def ctc_loss_grad(
    em: np.ndarray, labels: Sequence[int], blank: int | None = None
) -> tuple[float, np.ndarray]:
    """Negative log-likelihood and its gradient with respect to the logits
    that produced ``em`` through a row-wise softmax.

    The gradient is ``y - gamma`` where ``gamma[t, k]`` is the posterior
    probability that frame ``t`` is labelled ``k`` given the transcript.
    """
    em = np.asarray(em, dtype=float)
    blank_id = _blank(em, blank)
    if min_frames(labels) > em.shape[0]:
        raise InfeasibleTranscriptError(
            f"transcript of length {len(labels)} needs {min_frames(labels)} frames, "
            f"only {em.shape[0]} available"
        )
    alpha = forward(em, labels, blank_id)
    beta = backward(em, labels, blank_id)
    ext = _extended(labels, blank_id)
    log_p = label_log_prob(em, labels, blank_id)
    if not np.isfinite(log_p):
        raise InfeasibleTranscriptError("transcript has zero probability under these emissions")

    # alpha and beta both include the frame-t emission
    em_ext = em[:, ext]
    with np.errstate(invalid="ignore"):
        occ = np.where(np.isneginf(em_ext), NEG_INF, alpha + beta - em_ext)
    T, K = em.shape
    log_gamma = np.full((T, K), NEG_INF)
    for k in np.unique(ext):
        log_gamma[:, k] = logsumexp(occ[:, ext == k], axis=1)
    gamma = np.exp(log_gamma - log_p)
    grad = np.exp(em) - gamma
    return -log_p, grad


def greedy_decode(em: np.ndarray, blank: int | None = None) -> tuple[int, ...]:
    """Collapse the per-frame argmax path; ties go to the lowest symbol id."""
    em = np.asarray(em, dtype=float)
    return collapse(np.argmax(em, axis=1).tolist(), _blank(em, blank))
