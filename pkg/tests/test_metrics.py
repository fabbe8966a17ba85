import random

import pytest
from hypothesis import given, strategies as st

from fingerspell.alphabet import ALPHABET
from fingerspell.metrics import (
    EvalRecord,
    align,
    bucket_by_fps,
    confusion_stats,
    letter_accuracy,
)
from oracles import levenshtein_ref

enc = ALPHABET.encode


def rec(rid, ref, hyp, fps=None):
    return EvalRecord(rid, enc(ref), enc(hyp), fps)


def test_align_examples():
    c, pairs = align(enc("hello"), enc("hello"))
    assert (c.S, c.I, c.D, c.N) == (0, 0, 0, 5)
    c, _ = align(enc("hello"), enc("helo"))
    assert (c.S, c.I, c.D, c.N) == (0, 0, 1, 5)
    c, pairs = align(enc("ab"), enc("ba"))
    assert (c.S, c.I, c.D) == (2, 0, 0)
    assert pairs == [(0, 1), (1, 0)]


def test_align_pairs_cover_both_sides():
    ref, hyp = enc("kitten"), enc("sitting")
    c, pairs = align(ref, hyp)
    assert tuple(a for a, _ in pairs if a is not None) == ref
    assert tuple(b for _, b in pairs if b is not None) == hyp
    assert c.errors == 3


def test_empty_reference_rejected():
    with pytest.raises(ValueError):
        align((), enc("a"))
    with pytest.raises(ValueError):
        EvalRecord("x", (), ())


seqs = st.lists(st.integers(0, 4), max_size=20)


@given(seqs.filter(len), seqs)
def test_align_cost_is_levenshtein(r, h):
    c, _ = align(r, h)
    assert c.errors == levenshtein_ref(r, h)
    assert c.S + c.D <= c.N


def test_letter_accuracy():
    assert letter_accuracy([rec("1", "abc", "abc"), rec("2", "x", "x")]) == 1.0
    assert letter_accuracy([rec("1", "roberto", "rberto")]) == pytest.approx(1 - 1 / 7)
    # pooled, not averaged per record
    assert letter_accuracy([rec("1", "ab", "a"), rec("2", "abcdef", "abcdef")]) == pytest.approx(1 - 1 / 8)
    assert letter_accuracy([rec("1", "a", "bcd")]) == pytest.approx(-2.0)


def test_letter_accuracy_order_invariant():
    rnd = random.Random(0)
    letters = "abcdefgh"
    rs = [rec(str(i), "".join(rnd.choices(letters, k=rnd.randint(1, 9))), "".join(rnd.choices(letters, k=rnd.randint(0, 9)))) for i in range(30)]
    acc = letter_accuracy(rs)
    rnd.shuffle(rs)
    assert letter_accuracy(rs) == acc


def test_confusion_empty_without_substitutions():
    assert confusion_stats([rec("1", "abc", "ab"), rec("2", "x", "xy")]) == {}


def test_confusion_counted_construction():
    u, r = enc("ur")
    # 10 occurrences of 'u', three of them read as 'r'
    records = [rec(str(i), "bub", "brb" if i < 3 else "bub") for i in range(10)]
    stats = confusion_stats(records)
    assert stats == {(u, r): pytest.approx(30.0)}


def test_confusion_percentages_bounded():
    rnd = random.Random(1)
    rs = [rec(str(i), "".join(rnd.choices("abc", k=6)), "".join(rnd.choices("abc", k=6))) for i in range(40)]
    stats = confusion_stats(rs)
    per_ref = {}
    for (a, _), pct in stats.items():
        assert 0 <= pct <= 100
        per_ref[a] = per_ref.get(a, 0) + pct
    assert all(v <= 100 + 1e-9 for v in per_ref.values())


def test_bucket_single():
    rs = [rec("1", "abc", "abd", 30.0), rec("2", "xy", "xy", 25.0)]
    out = bucket_by_fps(rs, [10.0])
    assert len(out) == 1
    lo, hi, acc, n = out[0]
    assert (lo, hi, n) == (10.0, float("inf"), 2)
    assert acc == letter_accuracy(rs)


def test_bucket_two_and_edge_convention():
    rs = [rec("1", "ab", "a", 15.0), rec("2", "ab", "b", 20.0 - 1e-9), rec("3", "cd", "cd", 20.0)]
    out = bucket_by_fps(rs, [10.0, 20.0, 40.0])
    assert [(lo, hi) for lo, hi, _, _ in out] == [(10.0, 20.0), (20.0, 40.0)]
    assert [acc for _, _, acc, _ in out] == [0.5, 1.0]


def test_bucket_errors():
    with pytest.raises(ValueError, match="rec7"):
        bucket_by_fps([rec("rec7", "a", "a")], [10.0])
    with pytest.raises(ValueError):
        bucket_by_fps([rec("1", "a", "a", 5.0)], [10.0, 10.0])
