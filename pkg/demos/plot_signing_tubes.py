"""
Linking hand detections into a signing tube
===========================================

Per-frame detections are noisy: the top-scoring box sometimes lands on the
other hand or on clutter. Linking boxes across frames with the DP tube
favours temporally consistent boxes.
"""

import numpy as np

from fingerspell.geometry import nms
from fingerspell.synth import SynthConfig, synth_generate
from fingerspell.tubes import LinkerConfig, argmax_tube, best_tube, tube_quality

###############################################################################
# One synthetic sequence with a second hand and random clutter boxes.
cfg = SynthConfig(seed=3, detection_jitter=10.0, distractors_per_frame=2,
                  distractor_score_range=(0.1, 0.85))
sample = synth_generate("fingerspelling", cfg)
frames = [nms(f, iou_threshold=0.9, max_boxes=50) for f in sample.detections]
print("frames:", len(frames), "boxes per frame:", [len(f.boxes) for f in frames][:10], "...")

###############################################################################
# Compare the per-frame argmax with the linked tube for a few values of lambda.
print("per-frame argmax quality: %.3f" % tube_quality(argmax_tube(frames), sample.gold))
for lam in (0.0, 0.3, 1.0, 3.0):
    tube = best_tube(frames, LinkerConfig(lam))
    print("lambda=%.1f  E(l)=%.3f  quality=%.3f" % (lam, tube.sequence_score, tube_quality(tube, sample.gold)))

###############################################################################
# The benchmark used by the test suite averages this over 500 sequences.
from fingerspell.benchmarks import tube_smoothing_benchmark

res = tube_smoothing_benchmark(100)
print("100-sequence benchmark: argmax %.1f%% -> tube %.1f%%"
      % (100 * res.per_frame_argmax, 100 * res.smoothed))
