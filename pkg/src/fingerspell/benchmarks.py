"""Synthetic benchmarks for tube smoothing and LM fusion, with fixed seeds."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .alphabet import ALPHABET
from .beam import FusionConfig, beam_decode
from .ctc import greedy_decode
from .geometry import nms
from .lm import train_ngram
from .metrics import EvalRecord, letter_accuracy
from .synth import SynthConfig, random_bigram_law, sample_bigram_transcripts, synth_corpus
from .tubes import LinkerConfig, argmax_tube, best_tube, tube_quality

TUBE_BENCHMARK_SEED = 2024
TUBE_BENCHMARK = SynthConfig(
    seed=TUBE_BENCHMARK_SEED,
    detection_jitter=10.0,
    distractors_per_frame=2,
    distractor_score_range=(0.1, 0.85),
)

FUSION_BENCHMARK_SEED = 7
FUSION_NOISE = dict(emission_noise=0.4, flip_prob=0.15)


@dataclass
class TubeBenchmarkResult:
    smoothed: float
    per_frame_argmax: float
    n_sequences: int


def tube_smoothing_benchmark(n: int = 500, config: SynthConfig = TUBE_BENCHMARK,
                             lam: float = 0.3, nms_iou: float = 0.9, max_boxes: int = 50,
                             iou_threshold: float = 0.5) -> TubeBenchmarkResult:
    """Mean tube quality of the DP tube versus the per-frame top box."""
    texts = sample_bigram_transcripts(n, np.random.default_rng(config.seed))
    dp, base = [], []
    for s in synth_corpus(texts, config):
        frames = [nms(f, nms_iou, max_boxes) for f in s.detections]
        dp.append(tube_quality(best_tube(frames, LinkerConfig(lam)), s.gold, iou_threshold))
        base.append(tube_quality(argmax_tube(frames, lam), s.gold, iou_threshold))
    return TubeBenchmarkResult(float(np.mean(dp)), float(np.mean(base)), n)


@dataclass
class FusionBenchmarkResult:
    greedy: float
    beam_no_lm: float
    beam_lm: float
    lm_weight: float
    insertion_penalty: float


def _accuracy(samples, decode):
    return letter_accuracy([EvalRecord(s.id, s.labels, decode(s.emissions)) for s in samples])


def lm_fusion_benchmark(
    seed: int = FUSION_BENCHMARK_SEED,
    n_train: int = 2000,
    n_dev: int = 60,
    n_test: int = 150,
    beam_size: int = 8,
    lm_weights=(0.3, 0.6, 1.0),
    penalties=(0.0, 0.5, 1.0),
    noise: dict = FUSION_NOISE,
) -> FusionBenchmarkResult:
    """Train a bigram LM on transcripts from a hidden bigram law, tune
    (lm_weight, insertion_penalty) on a dev split and report test accuracy
    for greedy decoding, plain beam search and fused beam search."""
    rng = np.random.default_rng(seed)
    law = random_bigram_law(rng, successors=5)
    train = sample_bigram_transcripts(n_train, rng, law=law)
    dev = sample_bigram_transcripts(n_dev, rng, law=law)
    test = sample_bigram_transcripts(n_test, rng, law=law)
    lm = train_ngram([ALPHABET.encode(t) for t in train], 2, 0.1, len(ALPHABET))

    dev_s = synth_corpus(dev, SynthConfig(seed=seed + 1, **noise))
    test_s = synth_corpus(test, SynthConfig(seed=seed + 2, **noise))

    best = None
    for gamma, beta in itertools.product(lm_weights, penalties):
        cfg = FusionConfig(beam_size, gamma, beta)
        acc = _accuracy(dev_s, lambda em: beam_decode(em, lm, cfg)[0])
        if best is None or acc > best[0]:
            best = (acc, gamma, beta)
    _, gamma, beta = best
    return FusionBenchmarkResult(
        greedy=_accuracy(test_s, greedy_decode),
        beam_no_lm=_accuracy(test_s, lambda em: beam_decode(em, None, FusionConfig(beam_size))[0]),
        beam_lm=_accuracy(test_s, lambda em: beam_decode(em, lm, FusionConfig(beam_size, gamma, beta))[0]),
        lm_weight=gamma,
        insertion_penalty=beta,
    )
