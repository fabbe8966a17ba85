"""Line-oriented text formats.

Every file starts with a ``#fingerspell <kind> v1`` magic line. Floats are
written with ``repr`` so that reading back yields identical values.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .alphabet import ALPHABET, Alphabet
from .geometry import BoundingBox, FrameDetections, ScoredBox
from .lm import NGramLM
from .tubes import SigningTube

VERSION = "v1"


class FormatError(ValueError):
    pass


def _fmt(x: float) -> str:
    return repr(float(x))


def _header(kind: str) -> str:
    return f"#fingerspell {kind} {VERSION}\n"


def _lines(path) -> list[str]:
    return Path(path).read_text().splitlines()


def _expect(lines: list[str], kind: str, path) -> list[str]:
    if not lines or lines[0].split() != ["#fingerspell", kind, VERSION]:
        raise FormatError(f"{path}: not a fingerspell {kind} {VERSION} file")
    return lines[1:]


def _kv(line: str, key: str, path) -> list[str]:
    parts = line.split()
    if not parts or parts[0] != key:
        raise FormatError(f"{path}: expected '{key}' line, got {line!r}")
    return parts[1:]


# detections -------------------------------------------------------------

def write_detections(path, frames: Sequence[FrameDetections]) -> None:
    out = [_header("detections"), f"frames {len(frames)}\n"]
    for fr in frames:
        vals = [str(fr.frame_index)]
        for sb in fr.boxes:
            vals += [_fmt(v) for v in sb.box.as_tuple()] + [_fmt(sb.score)]
        out.append(" ".join(vals) + "\n")
    Path(path).write_text("".join(out))


def read_detections(path) -> list[FrameDetections]:
    body = _expect(_lines(path), "detections", path)
    n = int(_kv(body[0], "frames", path)[0])
    rows = body[1:]
    if len(rows) != n:
        raise FormatError(f"{path}: header says {n} frames, found {len(rows)}")
    frames = []
    for row in rows:
        parts = row.split()
        vals = [float(v) for v in parts[1:]]
        if len(vals) % 5:
            raise FormatError(f"{path}: frame {parts[0]} has a partial box record")
        boxes = tuple(
            ScoredBox(BoundingBox(*vals[i:i + 4]), vals[i + 4]) for i in range(0, len(vals), 5)
        )
        frames.append(FrameDetections(int(parts[0]), boxes))
    idx = [f.frame_index for f in frames]
    if len(set(idx)) != len(idx):
        raise FormatError(f"{path}: duplicate frame_index")
    return frames


# tubes ------------------------------------------------------------------

def write_tube(path, tube: SigningTube, frame_indices: Optional[Sequence[int]] = None) -> None:
    if frame_indices is None:
        frame_indices = range(len(tube.boxes))
    out = [_header("tube"), f"frames {len(tube.boxes)}\n", f"sequence_score {_fmt(tube.sequence_score)}\n"]
    for fi, sb in zip(frame_indices, tube.boxes):
        out.append(" ".join([str(fi)] + [_fmt(v) for v in sb.box.as_tuple()] + [_fmt(sb.score)]) + "\n")
    Path(path).write_text("".join(out))


def read_tube(path) -> tuple[SigningTube, list[int]]:
    body = _expect(_lines(path), "tube", path)
    n = int(_kv(body[0], "frames", path)[0])
    score = float(_kv(body[1], "sequence_score", path)[0])
    idx, boxes = [], []
    for row in body[2:2 + n]:
        p = row.split()
        idx.append(int(p[0]))
        v = [float(x) for x in p[1:]]
        boxes.append(ScoredBox(BoundingBox(*v[:4]), v[4]))
    return SigningTube(tuple(boxes), score), idx


def write_gold(path, boxes: Sequence[BoundingBox]) -> None:
    out = [_header("gold"), f"frames {len(boxes)}\n"]
    out += [" ".join(_fmt(v) for v in b.as_tuple()) + "\n" for b in boxes]
    Path(path).write_text("".join(out))


def read_gold(path) -> list[BoundingBox]:
    body = _expect(_lines(path), "gold", path)
    n = int(_kv(body[0], "frames", path)[0])
    return [BoundingBox(*map(float, row.split())) for row in body[1:1 + n]]


# emissions --------------------------------------------------------------

def write_emissions(path, em: np.ndarray, alphabet: Alphabet = ALPHABET) -> None:
    em = np.asarray(em, dtype=float)
    if em.shape[1] != alphabet.size_with_blank:
        raise ValueError(f"emission width {em.shape[1]} != alphabet size {alphabet.size_with_blank}")
    out = [
        _header("emissions"),
        f"shape {em.shape[0]} {em.shape[1]}\n",
        "alphabet " + " ".join(alphabet.tokens()) + "\n",
        f"blank {alphabet.blank_id}\n",
    ]
    out += [" ".join(_fmt(v) for v in row) + "\n" for row in em]
    Path(path).write_text("".join(out))


def read_emissions(path) -> tuple[np.ndarray, Alphabet]:
    body = _expect(_lines(path), "emissions", path)
    T, K = map(int, _kv(body[0], "shape", path))
    alphabet = Alphabet.from_tokens(_kv(body[1], "alphabet", path))
    blank = int(_kv(body[2], "blank", path)[0])
    if blank != alphabet.blank_id or K != alphabet.size_with_blank:
        raise FormatError(f"{path}: blank must be the last of {K} columns")
    em = np.array([[float(v) for v in row.split()] for row in body[3:3 + T]], dtype=float)
    if em.shape != (T, K):
        raise FormatError(f"{path}: expected {T}x{K} values, got {em.shape}")
    return em, alphabet


# named tensors (attention parameters, encoder states) -------------------

def write_tensors(path, tensors: dict[str, np.ndarray]) -> None:
    out = [_header("tensors")]
    for name in sorted(tensors):
        arr = np.asarray(tensors[name], dtype=float)
        out.append(f"tensor {name} " + " ".join(map(str, arr.shape)) + "\n")
        out.append(" ".join(_fmt(v) for v in arr.ravel()) + "\n")
    Path(path).write_text("".join(out))


def read_tensors(path) -> dict[str, np.ndarray]:
    body = _expect(_lines(path), "tensors", path)
    out = {}
    for head, data in zip(body[0::2], body[1::2]):
        parts = _kv(head, "tensor", path)
        name, shape = parts[0], tuple(int(s) for s in parts[1:])
        vals = np.array([float(v) for v in data.split()], dtype=float)
        if vals.size != math.prod(shape):
            raise FormatError(f"{path}: tensor {name} has {vals.size} values for shape {shape}")
        out[name] = vals.reshape(shape)
    return out


# n-gram LM --------------------------------------------------------------

def _sym_token(i: int, alphabet: Alphabet) -> str:
    if i == NGramLM.START:
        return "<s>"
    if i == len(alphabet):
        return "</s>"
    return alphabet.tokens(with_blank=False)[i]


def _sym_id(tok: str, alphabet: Alphabet) -> int:
    if tok == "<s>":
        return NGramLM.START
    if tok == "</s>":
        return len(alphabet)
    return alphabet.tokens(with_blank=False).index(tok)


def write_ngram(path, lm: NGramLM, alphabet: Alphabet = ALPHABET) -> None:
    out = [
        _header("ngram"),
        f"order {lm.order}\n",
        f"k {_fmt(lm.k)}\n",
        "alphabet " + " ".join(alphabet.tokens(with_blank=False)) + "\n",
    ]
    for ctx in sorted(lm.counts):
        row = lm.counts[ctx]
        for sym in np.flatnonzero(row):
            toks = [_sym_token(c, alphabet) for c in ctx] + ["->", _sym_token(int(sym), alphabet)]
            out.append("count " + " ".join(toks) + f" {_fmt(row[sym])}\n")
    Path(path).write_text("".join(out))


def read_ngram(path) -> NGramLM:
    body = _expect(_lines(path), "ngram", path)
    order = int(_kv(body[0], "order", path)[0])
    k = float(_kv(body[1], "k", path)[0])
    alphabet = Alphabet.from_tokens(_kv(body[2], "alphabet", path))
    n = len(alphabet)
    counts: dict[tuple[int, ...], np.ndarray] = {}
    for line in body[3:]:
        parts = _kv(line, "count", path)
        arrow = parts.index("->")
        ctx = tuple(_sym_id(t, alphabet) for t in parts[:arrow])
        sym = _sym_id(parts[arrow + 1], alphabet)
        counts.setdefault(ctx, np.zeros(n + 1))[sym] = float(parts[arrow + 2])
    return NGramLM(order, k, n, counts)


# transcripts and manifests ----------------------------------------------

def write_transcripts(path, rows: Iterable[tuple[str, str, Optional[float]]]) -> None:
    """One ``id<TAB>text[<TAB>fps]`` line per sequence."""
    out = []
    for rid, text, fps in rows:
        fields = [rid, text] + ([] if fps is None else [_fmt(fps)])
        out.append("\t".join(fields) + "\n")
    Path(path).write_text("".join(out))


def read_transcripts(path) -> list[tuple[str, str, Optional[float]]]:
    rows = []
    for line in _lines(path):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) not in (2, 3):
            raise FormatError(f"{path}: bad transcript line {line!r}")
        fps = float(parts[2]) if len(parts) == 3 and parts[2] else None
        rows.append((parts[0], parts[1], fps))
    return rows


MANIFEST_FIELDS = ("id", "fps", "transcript", "detections", "emissions", "encoder", "gold")


def write_manifest(path, records: Iterable[dict]) -> None:
    out = ["\t".join(MANIFEST_FIELDS) + "\n"]
    for r in records:
        vals = []
        for f in MANIFEST_FIELDS:
            v = r.get(f)
            vals.append("" if v is None else (_fmt(v) if f == "fps" else str(v)))
        out.append("\t".join(vals) + "\n")
    Path(path).write_text("".join(out))


def read_manifest(path) -> list[dict]:
    """Relative file paths are resolved against the manifest's directory."""
    path = Path(path)
    lines = [l for l in _lines(path) if l.strip()]
    head = lines[0].split("\t")
    if head[0] != "id":
        raise FormatError(f"{path}: manifest must start with an 'id' header column")
    records = []
    for line in lines[1:]:
        vals = line.split("\t")
        r = {f: (vals[i] if i < len(vals) and vals[i] != "" else None) for i, f in enumerate(head)}
        if r.get("fps") is not None:
            r["fps"] = float(r["fps"])
        for f in ("detections", "emissions", "encoder", "gold"):
            if r.get(f) is not None:
                r[f] = str(path.parent / r[f])
        records.append(r)
    return records


def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    cfg = {}
    for n, line in enumerate(_lines(path), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"{path}:{n}: expected key = value")
        key, val = line.split("=", 1)
        cfg[key.strip()] = val.strip()
    return cfg
