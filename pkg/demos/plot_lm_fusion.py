"""
Shallow fusion with a character n-gram model
============================================

A bigram model trained on transcripts is added to the CTC score inside the
prefix beam search, with a per-letter insertion penalty.
"""

import numpy as np

from fingerspell import ALPHABET, FusionConfig, beam_decode, greedy_decode, perplexity, train_ngram
from fingerspell.lm import UniformLM
from fingerspell.synth import SynthConfig, random_bigram_law, sample_bigram_transcripts, synth_generate

rng = np.random.default_rng(0)
law = random_bigram_law(rng, successors=5)
train = [ALPHABET.encode(t) for t in sample_bigram_transcripts(2000, rng, law=law)]
held_out = [ALPHABET.encode(t) for t in sample_bigram_transcripts(200, rng, law=law)]

###############################################################################
# Perplexity: 32 for the uniform model (31 symbols plus end), lower when trained.
lm = train_ngram(train, order=2, k=0.1)
print("uniform perplexity: %.2f" % perplexity(UniformLM(), held_out))
print("bigram perplexity:  %.2f" % perplexity(lm, held_out))

###############################################################################
# Sweep the LM weight and insertion penalty on one noisy sequence.
text = ALPHABET.decode(held_out[0])
s = synth_generate(text, SynthConfig(seed=4, emission_noise=0.4, flip_prob=0.15))
print("reference:", text)
print("greedy:   ", ALPHABET.decode(greedy_decode(s.emissions)))
for gamma in (0.0, 0.3, 0.6, 1.0):
    for beta in (0.0, 1.0):
        best, _ = beam_decode(s.emissions, lm, FusionConfig(8, gamma, beta))
        print("lm_weight=%.1f ins=%.1f -> %s" % (gamma, beta, ALPHABET.decode(best)))

###############################################################################
# The tuned benchmark from the test suite.
from fingerspell.benchmarks import lm_fusion_benchmark

res = lm_fusion_benchmark()
print("greedy %.1f%%, beam %.1f%%, beam+LM %.1f%%" % (100 * res.greedy, 100 * res.beam_no_lm, 100 * res.beam_lm))
