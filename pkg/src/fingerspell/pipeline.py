"""Link -> decode -> evaluate over a manifest of records."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import io
from .alphabet import ALPHABET
from .attention import AttentionParams, decode as attn_decode
from .beam import FusionConfig, beam_decode
from .ctc import check_emissions, greedy_decode
from .geometry import nms
from .lm import NGramLM
from .metrics import EvalRecord, bucket_by_fps, confusion_stats, letter_accuracy, total_counts
from .tubes import LinkerConfig, best_tube, tube_quality

DECODERS = ("greedy", "ctc", "attn")


@dataclass(frozen=True)
class PipelineConfig:
    decoder: str = "ctc"
    beam_size: int = 8
    lm_weight: float = 0.0
    insertion_penalty: float = 0.0
    lam: float = 0.3
    nms_iou: float = 0.9
    max_boxes: int = 50
    tube_iou: float = 0.5
    lm_path: Optional[str] = None
    params_path: Optional[str] = None
    fps_buckets: tuple[float, ...] = ()
    top_confusions: int = 10
    jobs: int = 1

    def __post_init__(self):
        if self.decoder not in DECODERS:
            raise ValueError(f"decoder must be one of {DECODERS}")

    @classmethod
    def from_mapping(cls, cfg: dict) -> "PipelineConfig":
        """Build from ``key=value`` strings, e.g. a config file."""
        conv = {
            "decoder": str, "beam_size": int, "lm_weight": float,
            "insertion_penalty": float, "lam": float, "nms_iou": float,
            "max_boxes": int, "tube_iou": float, "lm_path": str,
            "params_path": str, "top_confusions": int, "jobs": int,
            "fps_buckets": lambda s: tuple(float(x) for x in s.split(",") if x),
        }
        aliases = {"beam": "beam_size", "lambda": "lam", "ins_penalty": "insertion_penalty",
                   "lm": "lm_path", "params": "params_path"}
        kw = {}
        for key, val in cfg.items():
            key = aliases.get(key.replace("-", "_"), key.replace("-", "_"))
            if key not in conv:
                raise ValueError(f"unknown config key {key!r}")
            kw[key] = val if not isinstance(val, str) else conv[key](val)
        return cls(**kw)


@dataclass
class RecordResult:
    id: str
    reference: str
    hypothesis: Optional[str] = None
    fps: Optional[float] = None
    tube_quality: Optional[float] = None
    tube_score: Optional[float] = None
    error: Optional[str] = None


@dataclass
class PipelineReport:
    results: list[RecordResult]
    text: str
    accuracy: Optional[float] = None
    failures: list[dict] = field(default_factory=list)


def _load_models(config: PipelineConfig):
    lm = io.read_ngram(config.lm_path) if config.lm_path else None
    params = AttentionParams.from_tensors(io.read_tensors(config.params_path)) if config.params_path else None
    return lm, params


def process_record(rec: dict, config: PipelineConfig, lm=None, params=None) -> RecordResult:
    res = RecordResult(rec["id"], rec.get("transcript") or "", fps=rec.get("fps"))
    stage = "load"
    try:
        ALPHABET.encode(res.reference)
        if rec.get("detections"):
            stage = "link"
            frames = [nms(f, config.nms_iou, config.max_boxes) for f in io.read_detections(rec["detections"])]
            tube = best_tube(frames, LinkerConfig(config.lam))
            res.tube_score = tube.sequence_score
            if rec.get("gold"):
                res.tube_quality = tube_quality(tube, io.read_gold(rec["gold"]), config.tube_iou)
        stage = "decode"
        if config.decoder == "attn":
            if params is None:
                raise ValueError("attention decoder needs a parameter file")
            if not rec.get("encoder"):
                raise ValueError("record has no encoder-state file")
            enc = io.read_tensors(rec["encoder"])["states"]
            labels, _ = attn_decode(enc, params, config.beam_size)
        else:
            if not rec.get("emissions"):
                raise ValueError("record has no emissions file")
            em, alphabet = io.read_emissions(rec["emissions"])
            if alphabet != ALPHABET:
                raise ValueError("emissions file uses a different alphabet")
            em = check_emissions(em)
            if config.decoder == "greedy":
                labels = greedy_decode(em)
            else:
                fusion = FusionConfig(config.beam_size, config.lm_weight if lm else 0.0, config.insertion_penalty)
                labels, _ = beam_decode(em, lm, fusion)
        res.hypothesis = ALPHABET.decode(labels)
    except Exception as exc:  # reported per record, the batch continues
        res.error = f"{stage}: {type(exc).__name__}: {exc}"
    return res


def _worker(args):
    rec, config = args
    lm, params = _load_models(config)
    return process_record(rec, config, lm, params)


def run_pipeline(records: Sequence[dict], config: PipelineConfig = PipelineConfig()) -> PipelineReport:
    records = sorted(records, key=lambda r: r["id"])
    if config.jobs > 1:
        with ProcessPoolExecutor(config.jobs) as ex:
            results = list(ex.map(_worker, [(r, config) for r in records], chunksize=8))
    else:
        lm, params = _load_models(config)
        results = [process_record(r, config, lm, params) for r in records]
    return build_report(results, config)


def build_report(results: Sequence[RecordResult], config: PipelineConfig) -> PipelineReport:
    ok = [r for r in results if r.error is None]
    failures = [{"id": r.id, "error": r.error} for r in results if r.error is not None]
    evals = [
        EvalRecord(r.id, ALPHABET.encode(r.reference), ALPHABET.encode(r.hypothesis), r.fps)
        for r in ok if r.reference
    ]
    lines = [f"decoder: {config.decoder}", f"records: {len(results)} scored: {len(evals)} failed: {len(failures)}"]
    acc = None
    if evals:
        acc = letter_accuracy(evals)
        lines += format_metrics(evals, config.top_confusions, config.fps_buckets)
    quals = [r.tube_quality for r in ok if r.tube_quality is not None]
    if quals:
        lines.append(f"tube quality (IoU > {config.tube_iou}): {100 * float(np.mean(quals)):.2f}%")
    lines.append("hypotheses:")
    for r in results:
        lines.append(f"  {r.id}\t{r.reference}\t{r.hypothesis if r.error is None else '<failed>'}")
    if failures:
        lines.append("failures:")
        lines += [f"  {json.dumps(f, sort_keys=True)}" for f in failures]
    return PipelineReport(list(results), "\n".join(lines) + "\n", acc, failures)


def format_metrics(evals: Sequence[EvalRecord], top: int = 10, fps_buckets: Sequence[float] = ()) -> list[str]:
    c = total_counts(evals)
    acc = letter_accuracy(evals)
    lines = [
        f"letter accuracy: {100 * acc:.2f}%",
        f"N={c.N} S={c.S} I={c.I} D={c.D}",
    ]
    conf = confusion_stats(evals)
    if conf:
        lines.append("top substitutions (ref -> hyp, % of ref occurrences):")
        ranked = sorted(conf.items(), key=lambda kv: (-kv[1], kv[0]))[:top]
        for (a, b), pct in ranked:
            lines.append(f"  {_sym(a)} -> {_sym(b)}\t{pct:.1f}")
    if fps_buckets:
        if all(r.fps is not None for r in evals):
            lines.append("accuracy by fps:")
            for lo, hi, bacc, n in bucket_by_fps(evals, fps_buckets):
                lines.append(f"  [{lo:g}, {hi:g})\t{100 * bacc:.2f}%\t{n}")
        else:
            lines.append("accuracy by fps: unavailable (records without fps)")
    return lines


def _sym(i: int) -> str:
    return ALPHABET.tokens(with_blank=False)[i]
