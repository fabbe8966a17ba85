"""Brute-force reference computations, deliberately naive and independent
of the package internals."""

import itertools
import math
from collections import defaultdict

import numpy as np


def collapse_ref(path, blank):
    merged = [k for i, k in enumerate(path) if i == 0 or k != path[i - 1]]
    return tuple(k for k in merged if k != blank)


def ctc_enumerate(probs, blank):
    """Map every transcript to its total probability by walking all K^T paths."""
    T, K = probs.shape
    out = defaultdict(float)
    for path in itertools.product(range(K), repeat=T):
        p = 1.0
        for t, k in enumerate(path):
            p *= probs[t, k]
        out[collapse_ref(path, blank)] += p
    return out


def ctc_enumerate_split(probs, blank):
    """Per transcript, path mass split by whether the last frame is blank."""
    T, K = probs.shape
    out = defaultdict(lambda: [0.0, 0.0])
    for path in itertools.product(range(K), repeat=T):
        p = math.prod(probs[t, k] for t, k in enumerate(path))
        out[collapse_ref(path, blank)][0 if path[-1] == blank else 1] += p
    return out


def softmax_ref(x):
    e = [math.exp(v - max(x)) for v in x]
    s = sum(e)
    return [v / s for v in e]


def levenshtein_ref(a, b):
    """Classic two-row DP."""
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def greedy_nms_ref(boxes, scores, thr, iou_fn):
    """Literal loop: pop the best remaining index, discard its heavy overlaps."""
    remaining = list(range(len(boxes)))
    keep = []
    while remaining:
        best = remaining[0]
        for i in remaining:
            if scores[i] > scores[best]:
                best = i
        keep.append(best)
        remaining = [i for i in remaining if i != best and iou_fn(boxes[i], boxes[best]) <= thr]
    return keep


def best_tube_ref(frames, lam, iou_fn):
    """Exhaustive search over every box sequence; returns (best score, sequences achieving it)."""
    T = len(frames)
    best, argbest = -math.inf, []
    for choice in itertools.product(*[range(len(f)) for f in frames]):
        tot = 0.0
        for t in range(T - 1):
            a, b = frames[t][choice[t]], frames[t + 1][choice[t + 1]]
            tot += a[1] + b[1] + lam * iou_fn(a[0], b[0])
        tot /= T
        if tot > best + 1e-12:
            best, argbest = tot, [choice]
        elif abs(tot - best) <= 1e-12:
            argbest.append(choice)
    return best, argbest
