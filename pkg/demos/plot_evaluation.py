"""
Letter accuracy and confusion statistics
========================================

Accuracy pools substitutions, insertions and deletions over all records.
"""

from fingerspell import ALPHABET, EvalRecord, align, bucket_by_fps, confusion_stats, letter_accuracy

pairs = [("roberto", "rberto", 30), ("much", "mrch", 24), ("nad", "nad", 15), ("yes", "ies", 60)]
records = [EvalRecord(str(i), ALPHABET.encode(r), ALPHABET.encode(h), fps) for i, (r, h, fps) in enumerate(pairs)]

counts, aligned = align(records[0].reference, records[0].hypothesis)
print(counts)
print([(ALPHABET.decode([a]) if a is not None else "-", ALPHABET.decode([b]) if b is not None else "-") for a, b in aligned])

print("accuracy: %.3f" % letter_accuracy(records))
for (a, b), pct in sorted(confusion_stats(records).items(), key=lambda kv: -kv[1]):
    print("%s -> %s  %.1f%%" % (ALPHABET.decode([a]), ALPHABET.decode([b]), pct))
for lo, hi, acc, n in bucket_by_fps(records, [20, 40]):
    print("fps [%g, %g): %.3f over %d records" % (lo, hi, acc, n))
