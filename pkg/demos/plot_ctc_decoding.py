"""
CTC scoring and decoding
========================

Label probabilities sum over every frame labelling that collapses to the
transcript. Here we check that on a tiny example, then decode a synthetic
emission matrix.
"""

import itertools
import math

import numpy as np

from fingerspell import ALPHABET, collapse, greedy_decode, label_log_prob
from fingerspell.beam import FusionConfig, beam_decode
from fingerspell.ctc import ctc_loss_grad
from fingerspell.synth import SynthConfig, synth_generate

###############################################################################
# Two frames over {a, blank}: p("a") = 0.8 and p("") = 0.2.
em = np.log(np.array([[0.6, 0.4], [0.5, 0.5]]))
for w in [(), (0,), (0, 0)]:
    print(w, math.exp(label_log_prob(em, w)))

paths = itertools.product(range(2), repeat=2)
print("by enumeration:", sum(math.exp(em[0, p[0]] + em[1, p[1]]) for p in paths if collapse(p, 1) == (0,)))

###############################################################################
# The loss gradient with respect to logits has rows summing to zero.
loss, grad = ctc_loss_grad(em, (0,))
print("loss %.4f, row sums %s" % (loss, grad.sum(axis=1)))

###############################################################################
# A noisy synthetic sequence: greedy decoding versus prefix beam search.
s = synth_generate("hello world", SynthConfig(seed=1, emission_noise=0.4, flip_prob=0.2))
print("frames:", s.emissions.shape[0])
print("greedy:", ALPHABET.decode(greedy_decode(s.emissions)))
best, nbest = beam_decode(s.emissions, None, FusionConfig(beam_size=8))
for labels, score in nbest[:3]:
    print("beam:  %-14r %.3f" % (ALPHABET.decode(labels), score))
