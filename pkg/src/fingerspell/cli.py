"""Command-line entry point: ``fingerspell <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .alphabet import ALPHABET
from .attention import AttentionParams, decode as attn_decode
from .beam import FusionConfig, beam_decode
from .ctc import check_emissions, greedy_decode
from .geometry import nms
from .lm import perplexity, train_ngram
from .metrics import EvalRecord
from .pipeline import PipelineConfig, format_metrics, run_pipeline
from .synth import SynthConfig, sample_bigram_transcripts, synth_corpus, write_corpus
from .tubes import LinkerConfig, best_tube


def _fail(failures: list[dict]) -> int:
    for f in failures:
        print(json.dumps(f, sort_keys=True), file=sys.stderr)
    return 1


def cmd_link(args) -> int:
    frames = [nms(f, args.nms_iou, args.max_boxes) for f in io.read_detections(args.detections)]
    tube = best_tube(frames, LinkerConfig(args.lam))
    io.write_tube(args.out, tube, [f.frame_index for f in frames])
    return 0


def cmd_decode(args) -> int:
    if args.model == "attn":
        if not args.params:
            return _fail([{"error": "--params is required for --model attn"}])
        params = AttentionParams.from_tensors(io.read_tensors(args.params))
        enc = io.read_tensors(args.input)["states"]
        labels, score = attn_decode(enc, params, args.beam)
        print(f"best\t{ALPHABET.decode(labels)}\t{score!r}")
        return 0

    em, alphabet = io.read_emissions(args.input)
    em = check_emissions(em)
    if args.beam <= 1 and not args.lm:
        print(f"best\t{alphabet.decode(greedy_decode(em))}")
        return 0
    lm = io.read_ngram(args.lm) if args.lm else None
    best, nbest = beam_decode(em, lm, FusionConfig(args.beam, args.lm_weight, args.ins_penalty))
    print(f"best\t{alphabet.decode(best)}\t{nbest[0][1]!r}")
    for labels, score in nbest[: args.nbest]:
        print(f"nbest\t{alphabet.decode(labels)}\t{score!r}")
    return 0


def cmd_eval(args) -> int:
    refs = {rid: (text, fps) for rid, text, fps in io.read_transcripts(args.ref)}
    hyps = {rid: text for rid, text, _ in io.read_transcripts(args.hyp)}
    failures = [{"id": rid, "error": "missing hypothesis"} for rid in sorted(refs) if rid not in hyps]
    records = []
    for rid in sorted(refs):
        if rid in hyps:
            text, fps = refs[rid]
            records.append(EvalRecord(rid, ALPHABET.encode(text), ALPHABET.encode(hyps[rid]), fps))
    buckets = tuple(float(x) for x in args.fps_buckets.split(",")) if args.fps_buckets else ()
    if buckets:
        missing = [r.id for r in records if r.fps is None]
        if missing:
            return _fail([{"id": m, "error": "no fps tag"} for m in missing])
    print("\n".join(format_metrics(records, args.top, buckets)))
    return _fail(failures) if failures else 0


def cmd_synth(args) -> int:
    rng = np.random.default_rng(args.seed)
    texts = sample_bigram_transcripts(args.n, rng)
    cfg = SynthConfig(
        seed=args.seed, emission_noise=args.noise, flip_prob=args.flip_prob, floor=args.floor,
        detection_jitter=args.jitter, distractors_per_frame=args.distractors,
    )
    manifest = write_corpus(args.out, synth_corpus(texts, cfg))
    print(manifest)
    return 0


def cmd_train_lm(args) -> int:
    corpus = [ALPHABET.encode(text) for _, text, _ in io.read_transcripts(args.corpus)]
    io.write_ngram(args.out, train_ngram(corpus, args.order, args.k, len(ALPHABET)))
    return 0


def cmd_perplexity(args) -> int:
    lm = io.read_ngram(args.lm)
    corpus = [ALPHABET.encode(text) for _, text, _ in io.read_transcripts(args.corpus)]
    print(f"perplexity\t{perplexity(lm, corpus)!r}")
    return 0


def cmd_pipeline(args) -> int:
    cfg = io.read_config(args.config) if args.config else {}
    overrides = {
        "decoder": args.decoder, "beam_size": args.beam, "lm_weight": args.lm_weight,
        "insertion_penalty": args.ins_penalty, "lam": args.lam, "lm_path": args.lm,
        "params_path": args.params, "fps_buckets": args.fps_buckets, "jobs": args.jobs,
    }
    cfg.update({k: str(v) for k, v in overrides.items() if v is not None})
    config = PipelineConfig.from_mapping(cfg)
    report = run_pipeline(io.read_manifest(args.manifest), config)
    if args.out:
        Path(args.out).write_text(report.text)
    else:
        sys.stdout.write(report.text)
    return _fail(report.failures) if report.failures else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fingerspell", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("link", help="build the signing tube for a detections file")
    s.add_argument("detections")
    s.add_argument("-o", "--out", required=True)
    s.add_argument("--lambda", dest="lam", type=float, default=0.3)
    s.add_argument("--nms-iou", type=float, default=0.9)
    s.add_argument("--max-boxes", type=int, default=50)
    s.set_defaults(func=cmd_link)

    s = sub.add_parser("decode", help="decode an emissions or encoder-state file")
    s.add_argument("input")
    s.add_argument("--model", choices=("ctc", "attn"), default="ctc")
    s.add_argument("--beam", type=int, default=1)
    s.add_argument("--lm")
    s.add_argument("--lm-weight", type=float, default=0.0)
    s.add_argument("--ins-penalty", type=float, default=0.0)
    s.add_argument("--params", help="attention parameter file")
    s.add_argument("--nbest", type=int, default=5)
    s.set_defaults(func=cmd_decode)

    s = sub.add_parser("eval", help="score hypotheses against references")
    s.add_argument("--ref", required=True)
    s.add_argument("--hyp", required=True)
    s.add_argument("--fps-buckets")
    s.add_argument("--top", type=int, default=10)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("synth", help="write a synthetic corpus")
    s.add_argument("--out", required=True)
    s.add_argument("--n", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--noise", type=float, default=0.0)
    s.add_argument("--flip-prob", type=float, default=0.0)
    s.add_argument("--floor", type=float, default=0.0)
    s.add_argument("--jitter", type=float, default=0.0)
    s.add_argument("--distractors", type=int, default=0)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("train-lm", help="fit an add-k n-gram model to a transcript file")
    s.add_argument("--corpus", required=True)
    s.add_argument("--order", type=int, default=2)
    s.add_argument("--k", type=float, default=0.1)
    s.add_argument("-o", "--out", required=True)
    s.set_defaults(func=cmd_train_lm)

    s = sub.add_parser("perplexity", help="per-symbol perplexity of an LM on a corpus")
    s.add_argument("--lm", required=True)
    s.add_argument("--corpus", required=True)
    s.set_defaults(func=cmd_perplexity)

    s = sub.add_parser("pipeline", help="link, decode and evaluate a manifest")
    s.add_argument("manifest")
    s.add_argument("--config")
    s.add_argument("--decoder", choices=("greedy", "ctc", "attn"))
    s.add_argument("--beam", type=int)
    s.add_argument("--lm")
    s.add_argument("--lm-weight", type=float)
    s.add_argument("--ins-penalty", type=float)
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--params")
    s.add_argument("--fps-buckets")
    s.add_argument("--jobs", type=int)
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        return _fail([{"command": args.command, "error": f"{type(exc).__name__}: {exc}"}])


if __name__ == "__main__":
    sys.exit(main())
