"""Box arithmetic and greedy per-frame non-maxima suppression."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class BoundingBox:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError(f"invalid box {self}")

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x_min, self.y_min, self.x_max, self.y_max)


@dataclass(frozen=True)
class ScoredBox:
    box: BoundingBox
    score: float

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [0, 1]")


@dataclass(frozen=True)
class FrameDetections:
    frame_index: int
    boxes: tuple[ScoredBox, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.frame_index < 0:
            raise ValueError("frame_index must be non-negative")
        object.__setattr__(self, "boxes", tuple(self.boxes))


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union; 0 when the union has zero area."""
    w = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    h = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    inter = max(w, 0.0) * max(h, 0.0)
    union = a.area + b.area - inter
    if union <= 0.0:
        return 0.0
    return min(max(inter / union, 0.0), 1.0)


def nms(frame: FrameDetections, iou_threshold: float = 0.9, max_boxes: int = 50) -> FrameDetections:
    """Greedy NMS: keep the best remaining box, drop everything overlapping it
    by more than ``iou_threshold``, repeat; then keep at most ``max_boxes``.

    Equal scores are resolved in favour of the earlier box in the input list.
    The result is ordered by descending score.
    """
    if not 0.0 < iou_threshold <= 1.0:
        raise ValueError("iou_threshold must be in (0, 1]")
    if max_boxes < 1:
        raise ValueError("max_boxes must be >= 1")

    # stable sort keeps input order among equal scores
    order = sorted(range(len(frame.boxes)), key=lambda i: -frame.boxes[i].score)
    keep: list[ScoredBox] = []
    for i in order:
        cand = frame.boxes[i]
        if all(iou(cand.box, k.box) <= iou_threshold for k in keep):
            keep.append(cand)
    return FrameDetections(frame.frame_index, tuple(keep[:max_boxes]))
