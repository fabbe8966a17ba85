"""Signing-tube generation by dynamic programming over per-frame detections.

Consecutive boxes are scored with

    e(a, b) = a.score + b.score + lambda * IoU(a, b)

and the tube is the one-box-per-frame sequence maximising the sum of these
transition scores divided by the number of frames ``T``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import BoundingBox, FrameDetections, ScoredBox, iou


class EmptyFrameError(ValueError):
    """A frame has no candidate boxes, so no tube can pass through it."""


@dataclass(frozen=True)
class LinkerConfig:
    lam: float = 0.3

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be non-negative")


@dataclass(frozen=True)
class SigningTube:
    boxes: tuple[ScoredBox, ...]
    sequence_score: float

    def __len__(self) -> int:
        return len(self.boxes)


def linking_score(a: ScoredBox, b: ScoredBox, lam: float) -> float:
    return a.score + b.score + lam * iou(a.box, b.box)


def sequence_score(boxes: Sequence[ScoredBox], lam: float) -> float:
    T = len(boxes)
    if T == 0:
        raise ValueError("empty box sequence")
    total = sum(linking_score(boxes[t], boxes[t + 1], lam) for t in range(T - 1))
    return total / T


def _check_frames(frames: Sequence[FrameDetections]) -> None:
    if not frames:
        raise EmptyFrameError("no frames")
    for fr in frames:
        if not fr.boxes:
            raise EmptyFrameError(f"frame {fr.frame_index} has no boxes")


def best_tube(frames: Sequence[FrameDetections], config: LinkerConfig = LinkerConfig()) -> SigningTube:
    """Viterbi search for the highest-scoring tube, O(T n^2).

    Ties go to the lowest box index (boxes are taken in their stored order).
    """
    _check_frames(frames)
    lam = config.lam
    T = len(frames)
    if T == 1:
        scores = [b.score for b in frames[0].boxes]
        return SigningTube((frames[0].boxes[int(np.argmax(scores))],), 0.0)

    acc = np.zeros(len(frames[0].boxes))
    back = []
    for t in range(1, T):
        prev, cur = frames[t - 1].boxes, frames[t].boxes
        trans = np.empty((len(prev), len(cur)))
        for i, a in enumerate(prev):
            for j, b in enumerate(cur):
                trans[i, j] = linking_score(a, b, lam)
        total = acc[:, None] + trans
        # argmax returns the first maximum, i.e. the lowest previous index
        ptr = np.argmax(total, axis=0)
        acc = total[ptr, np.arange(len(cur))]
        back.append(ptr)

    j = int(np.argmax(acc))
    path = [j]
    for ptr in reversed(back):
        j = int(ptr[j])
        path.append(j)
    path.reverse()
    chosen = tuple(frames[t].boxes[k] for t, k in enumerate(path))
    return SigningTube(chosen, sequence_score(chosen, lam))


def argmax_tube(frames: Sequence[FrameDetections], lam: float = 0.3) -> SigningTube:
    """Unsmoothed baseline: the top-scoring box of every frame independently."""
    _check_frames(frames)
    chosen = tuple(max(fr.boxes, key=lambda b: b.score) for fr in frames)
    return SigningTube(chosen, sequence_score(chosen, lam))


def tube_quality(tube: SigningTube, gold: Sequence[BoundingBox], iou_threshold: float = 0.5) -> float:
    """Fraction of frames whose tube box overlaps the gold box by more than
    ``iou_threshold``."""
    if len(tube.boxes) != len(gold):
        raise ValueError(f"tube has {len(tube.boxes)} frames, gold has {len(gold)}")
    if not gold:
        raise ValueError("empty tube")
    hits = sum(iou(b.box, g) > iou_threshold for b, g in zip(tube.boxes, gold))
    return hits / len(gold)
