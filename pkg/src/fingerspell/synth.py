"""Synthetic detections and emissions with known ground truth.

Emission rows put ``1 - emission_noise`` on the displayed symbol and spread
``emission_noise`` evenly over that symbol's confusables. The displayed
symbol is the true one unless a confusion flip fires. Detections contain a
jittered copy of the gold hand box per frame, an optional persistent second
hand, and random clutter boxes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .alphabet import ALPHABET, Alphabet
from .geometry import BoundingBox, FrameDetections, ScoredBox

# groups of mutually confusable handshapes
DEFAULT_CONFUSION_GROUPS = ("asnt", "ruv", "oe", "wu", "ijy")


def confusables(alphabet: Alphabet, groups: Sequence[str]) -> dict[int, tuple[int, ...]]:
    out: dict[int, set[int]] = {i: set() for i in range(len(alphabet))}
    for g in groups:
        ids = alphabet.encode(g)
        for a in ids:
            out[a].update(b for b in ids if b != a)
    return {k: tuple(sorted(v)) for k, v in out.items()}


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    frames_per_letter: tuple[int, int] = (2, 4)
    blank_frames: tuple[int, int] = (0, 2)
    emission_noise: float = 0.0
    flip_prob: float = 0.0
    floor: float = 0.0
    confusion_groups: tuple[str, ...] = DEFAULT_CONFUSION_GROUPS
    detection_jitter: float = 0.0
    distractors_per_frame: int = 0
    distractor_score_range: tuple[float, float] = (0.2, 0.9)
    hand_score_range: tuple[float, float] = (0.6, 0.95)
    image_size: tuple[float, float] = (640.0, 480.0)
    box_size: float = 80.0
    fps_choices: tuple[float, ...] = (15.0, 24.0, 30.0, 60.0)

    def __post_init__(self):
        if not 0.0 <= self.emission_noise < 1.0:
            raise ValueError("emission_noise must be in [0, 1)")
        if not 0.0 <= self.flip_prob <= 1.0 or not 0.0 <= self.floor < 1.0:
            raise ValueError("flip_prob and floor must be probabilities")
        for lo, hi in (self.frames_per_letter, self.blank_frames):
            if lo > hi or lo < 0:
                raise ValueError("frame ranges must satisfy 0 <= lo <= hi")
        if self.frames_per_letter[0] < 1:
            raise ValueError("each letter needs at least one frame")
        if self.distractors_per_frame < 0 or self.detection_jitter < 0:
            raise ValueError("distractors and jitter must be non-negative")
        for lo, hi in (self.distractor_score_range, self.hand_score_range):
            if not 0.0 <= lo <= hi <= 1.0:
                raise ValueError("score ranges must lie in [0, 1]")


@dataclass
class SynthSample:
    id: str
    transcript: str
    labels: tuple[int, ...]
    path: list[int]
    emissions: np.ndarray
    detections: list[FrameDetections]
    gold: list[BoundingBox]
    fps: float
    meta: dict = field(default_factory=dict)


def frame_alignment(labels: Sequence[int], config: SynthConfig, rng, blank: int) -> list[int]:
    """Blank-interleaved frame labels; equal neighbours always get a blank between."""
    lo, hi = config.blank_frames
    path = [blank] * int(rng.integers(lo, hi + 1))
    for i, lab in enumerate(labels):
        if i > 0:
            n_blank = int(rng.integers(lo, hi + 1))
            if labels[i - 1] == lab:
                n_blank = max(n_blank, 1)
            path += [blank] * n_blank
        path += [lab] * int(rng.integers(config.frames_per_letter[0], config.frames_per_letter[1] + 1))
    path += [blank] * int(rng.integers(lo, hi + 1))
    if not path:
        path = [blank]
    return path


def emission_rows(path, config: SynthConfig, rng, alphabet: Alphabet = ALPHABET) -> np.ndarray:
    K = alphabet.size_with_blank
    blank = alphabet.blank_id
    conf = confusables(alphabet, config.confusion_groups)
    probs = np.zeros((len(path), K))
    for t, lab in enumerate(path):
        if lab == blank:
            probs[t, blank] = 1.0
            continue
        shown = lab
        if conf[lab] and config.flip_prob > 0 and rng.random() < config.flip_prob:
            shown = int(rng.choice(conf[lab]))
        c = conf[shown]
        if c:
            probs[t, shown] = 1.0 - config.emission_noise
            probs[t, list(c)] += config.emission_noise / len(c)
        else:
            probs[t, shown] = 1.0
    if config.floor > 0:
        probs = (1.0 - config.floor) * probs + config.floor / K
    with np.errstate(divide="ignore"):
        return np.log(probs)


def _clip_box(x, y, size, W, H):
    x = float(np.clip(x, 0.0, W - size))
    y = float(np.clip(y, 0.0, H - size))
    return BoundingBox(x, y, x + size, y + size)


def detection_track(T: int, config: SynthConfig, rng):
    """Gold trajectory plus per-frame detections."""
    W, H = config.image_size
    s = config.box_size
    gold, other = [], []
    x, y = rng.uniform(0, W - s), rng.uniform(0, H - s)
    ox, oy = rng.uniform(0, W - s), rng.uniform(0, H - s)
    for _ in range(T):
        x, y = x + rng.normal(0, 3.0), y + rng.normal(0, 3.0)
        gold.append(_clip_box(x, y, s, W, H))
        ox, oy = ox + rng.normal(0, 1.0), oy + rng.normal(0, 1.0)
        other.append(_clip_box(ox, oy, s, W, H))

    frames = []
    for t in range(T):
        g = gold[t]
        j = config.detection_jitter
        dx, dy, dw, dh = (rng.normal(0, j, 4) if j > 0 else np.zeros(4))
        size = max(s + dw, 4.0)
        hand = _clip_box(g.x_min + dx, g.y_min + dy, size, W, H)
        boxes = [ScoredBox(hand, float(rng.uniform(*config.hand_score_range)))]
        for d in range(config.distractors_per_frame):
            if d == 0:
                o = other[t]
                box = _clip_box(o.x_min + rng.normal(0, j), o.y_min + rng.normal(0, j), s, W, H)
            else:
                box = _clip_box(rng.uniform(0, W - s), rng.uniform(0, H - s), s, W, H)
            boxes.append(ScoredBox(box, float(rng.uniform(*config.distractor_score_range))))
        order = rng.permutation(len(boxes))
        frames.append(FrameDetections(t, tuple(boxes[i] for i in order)))
    return frames, gold


def synth_generate(
    transcript: str,
    config: SynthConfig = SynthConfig(),
    alphabet: Alphabet = ALPHABET,
    record_id: str = "seq0000",
    rng: Optional[np.random.Generator] = None,
) -> SynthSample:
    """One synthetic sequence; deterministic given ``config.seed`` (or ``rng``)."""
    labels = alphabet.encode(transcript)
    if rng is None:
        rng = np.random.default_rng(config.seed)
    path = frame_alignment(labels, config, rng, alphabet.blank_id)
    em = emission_rows(path, config, rng, alphabet)
    frames, gold = detection_track(len(path), config, rng)
    fps = float(rng.choice(config.fps_choices))
    return SynthSample(record_id, transcript.lower(), labels, path, em, frames, gold, fps)


def random_bigram_law(rng, n_symbols: int = 26, successors: int = 3, concentration: float = 0.3):
    """Sparse letter transition matrix with an extra end column, and start probs."""
    trans = np.zeros((n_symbols, n_symbols + 1))
    for a in range(n_symbols):
        nxt = rng.choice(n_symbols, size=successors, replace=False)
        trans[a, nxt] = rng.dirichlet(np.full(successors, 1.0 / concentration))
    trans[:, :n_symbols] *= 0.8
    trans[:, n_symbols] = 0.2
    start = rng.dirichlet(np.ones(n_symbols))
    return start, trans


def sample_bigram_transcripts(n, rng, alphabet: Alphabet = ALPHABET, law=None,
                              min_len: int = 3, max_len: int = 10):
    """Letter strings drawn from a bigram chain over a-z, truncated to ``max_len``."""
    start, trans = law if law is not None else random_bigram_law(rng)
    letters = trans.shape[0]
    out = []
    while len(out) < n:
        seq = [int(rng.choice(letters, p=start))]
        while len(seq) < max_len:
            nxt = int(rng.choice(letters + 1, p=trans[seq[-1]]))
            if nxt == letters:
                break
            seq.append(nxt)
        if len(seq) >= min_len:
            out.append(alphabet.decode(seq))
    return out


def synth_corpus(transcripts: Sequence[str], config: SynthConfig = SynthConfig(),
                 alphabet: Alphabet = ALPHABET) -> list[SynthSample]:
    """Independent per-record streams spawned from ``config.seed``."""
    seeds = np.random.SeedSequence(config.seed).spawn(len(transcripts))
    return [
        synth_generate(text, config, alphabet, f"seq{i:04d}", np.random.default_rng(s))
        for i, (text, s) in enumerate(zip(transcripts, seeds))
    ]


def write_corpus(out_dir, samples: Sequence[SynthSample], alphabet: Alphabet = ALPHABET) -> Path:
    """Write per-record files plus ``manifest.tsv`` and ``refs.tsv``; returns the manifest path."""
    from . import io

    out = Path(out_dir)
    for sub in ("detections", "emissions", "gold"):
        (out / sub).mkdir(parents=True, exist_ok=True)
    records = []
    for s in samples:
        io.write_detections(out / "detections" / f"{s.id}.txt", s.detections)
        io.write_emissions(out / "emissions" / f"{s.id}.txt", s.emissions, alphabet)
        io.write_gold(out / "gold" / f"{s.id}.txt", s.gold)
        records.append({
            "id": s.id, "fps": s.fps, "transcript": s.transcript,
            "detections": f"detections/{s.id}.txt",
            "emissions": f"emissions/{s.id}.txt",
            "gold": f"gold/{s.id}.txt",
        })
    io.write_manifest(out / "manifest.tsv", records)
    io.write_transcripts(out / "refs.tsv", [(s.id, s.transcript, s.fps) for s in samples])
    return out / "manifest.tsv"
