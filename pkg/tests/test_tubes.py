import numpy as np
import pytest

from fingerspell.geometry import BoundingBox, FrameDetections, ScoredBox, iou
from fingerspell.tubes import (
    EmptyFrameError,
    LinkerConfig,
    argmax_tube,
    best_tube,
    linking_score,
    sequence_score,
    tube_quality,
)
from oracles import best_tube_ref


def random_frames(rng, T, n_max, spread=40.0, n_min=1):
    frames = []
    for t in range(T):
        n = int(rng.integers(n_min, n_max + 1))
        boxes = []
        for _ in range(n):
            x, y = rng.uniform(0, spread, 2)
            w, h = rng.uniform(5, 30, 2)
            boxes.append(ScoredBox(BoundingBox(x, y, x + w, y + h), float(rng.uniform())))
        frames.append(FrameDetections(t, tuple(boxes)))
    return frames


def as_pairs(frames):
    return [[(b.box, b.score) for b in f.boxes] for f in frames]


def test_linking_score_examples():
    a = ScoredBox(BoundingBox(0, 0, 2, 1), 0.8)
    b = ScoredBox(BoundingBox(0, 0, 1, 1), 0.9)
    assert iou(a.box, b.box) == pytest.approx(0.5)
    assert linking_score(a, b, 0.3) == pytest.approx(1.85)
    assert linking_score(a, b, 0.0) == pytest.approx(1.7)
    c = ScoredBox(BoundingBox(1, 1, 4, 4), 0.5)
    assert linking_score(c, c, 1.0) == pytest.approx(2.0)


def test_negative_lambda_rejected():
    with pytest.raises(ValueError):
        LinkerConfig(-0.1)


def test_single_candidate_per_frame():
    rng = np.random.default_rng(0)
    frames = random_frames(rng, 5, 1)
    tube = best_tube(frames)
    assert tube.boxes == tuple(f.boxes[0] for f in frames)


def test_single_frame():
    rng = np.random.default_rng(1)
    frames = random_frames(rng, 1, 4)
    tube = best_tube(frames)
    assert tube.sequence_score == 0.0
    assert tube.boxes[0].score == max(b.score for b in frames[0].boxes)


def test_two_by_two_matches_enumeration():
    f0 = FrameDetections(0, (ScoredBox(BoundingBox(0, 0, 10, 10), 0.6), ScoredBox(BoundingBox(50, 50, 60, 60), 0.7)))
    f1 = FrameDetections(1, (ScoredBox(BoundingBox(1, 1, 11, 11), 0.5), ScoredBox(BoundingBox(80, 80, 90, 90), 0.55)))
    best, arg = best_tube_ref(as_pairs([f0, f1]), 1.0, iou)
    tube = best_tube([f0, f1], LinkerConfig(1.0))
    assert tube.sequence_score == pytest.approx(best)
    assert tube.boxes == (f0.boxes[arg[0][0]], f1.boxes[arg[0][1]])


@pytest.mark.parametrize("seed", range(5))
def test_six_by_four_matches_exhaustive(seed):
    rng = np.random.default_rng(seed)
    frames = random_frames(rng, 6, 4, n_min=4)
    best, arg = best_tube_ref(as_pairs(frames), 0.3, iou)
    tube = best_tube(frames, LinkerConfig(0.3))
    assert tube.sequence_score == pytest.approx(best, abs=1e-12)
    # lowest-index tie-breaking picks the lexicographically smallest optimum
    chosen = tuple(f.boxes.index(b) for f, b in zip(frames, tube.boxes))
    assert chosen in arg


def test_stored_score_is_recomputable():
    rng = np.random.default_rng(5)
    frames = random_frames(rng, 7, 3)
    tube = best_tube(frames, LinkerConfig(0.7))
    assert len(tube) == 7
    assert tube.sequence_score == pytest.approx(sequence_score(tube.boxes, 0.7))
    T = 7
    manual = sum(linking_score(tube.boxes[t], tube.boxes[t + 1], 0.7) for t in range(T - 1)) / T
    assert tube.sequence_score == pytest.approx(manual)


@pytest.mark.parametrize("seed", range(20))
def test_beats_per_frame_argmax(seed):
    rng = np.random.default_rng(100 + seed)
    frames = random_frames(rng, 8, 5)
    for lam in (0.0, 0.3, 2.0):
        assert best_tube(frames, LinkerConfig(lam)).sequence_score >= argmax_tube(frames, lam).sequence_score - 1e-12


def test_lambda_irrelevant_when_ious_equal():
    # all boxes disjoint, so every transition has IoU 0
    rng = np.random.default_rng(9)
    frames = []
    for t in range(5):
        frames.append(FrameDetections(t, tuple(
            ScoredBox(BoundingBox(100 * i + 10 * t, 0, 100 * i + 10 * t + 5, 5), float(rng.uniform()))
            for i in range(3)
        )))
    picks = {best_tube(frames, LinkerConfig(lam)).boxes for lam in (0.0, 0.3, 5.0)}
    assert len(picks) == 1


def test_empty_inputs_rejected():
    with pytest.raises(EmptyFrameError):
        best_tube([])
    ok = FrameDetections(0, (ScoredBox(BoundingBox(0, 0, 1, 1), 0.5),))
    with pytest.raises(EmptyFrameError, match="frame 1"):
        best_tube([ok, FrameDetections(1, ())])


def test_tube_quality_examples():
    rng = np.random.default_rng(3)
    frames = random_frames(rng, 10, 1)
    tube = best_tube(frames)
    gold = [b.box for b in tube.boxes]
    assert tube_quality(tube, gold) == 1.0
    far = [BoundingBox(1000, 1000, 1001, 1001)] * 10
    assert tube_quality(tube, far) == 0.0
    mixed = gold[:7] + far[:3]
    assert tube_quality(tube, mixed) == pytest.approx(0.7)
    with pytest.raises(ValueError):
        tube_quality(tube, gold[:9])


def test_tube_quality_threshold_is_strict():
    a = ScoredBox(BoundingBox(0, 0, 2, 1), 0.5)
    g = BoundingBox(0, 0, 1, 1)  # IoU 0.5
    tube = best_tube([FrameDetections(0, (a,))])
    assert tube_quality(tube, [g], 0.5) == 0.0
    assert tube_quality(tube, [g], 0.49) == 1.0
