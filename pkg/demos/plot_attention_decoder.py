"""
Attention decoder inference
===========================

Random parameters are enough to exercise the decoder: attention weights
are distributions over frames and beam search returns the most likely
transcript it finds.
"""

import numpy as np

from fingerspell.attention import AttentionParams, DecoderState, attend, decode, lstm_step, sequence_log_prob

rng = np.random.default_rng(0)
n_symbols, feat_dim = 4, 6
params = AttentionParams.random(rng, n_symbols, feat_dim, scale=0.8)
enc = rng.normal(size=(5, feat_dim))

###############################################################################
# One decoder step from the start token.
state = lstm_step(DecoderState.zeros(params.hidden_size), params.embed[params.start_id], params.lstm)
alpha, context = attend(enc, state.hidden, params)
print("attention:", np.round(alpha, 3), "sum", alpha.sum())

###############################################################################
# Beam width versus the log-probability of the returned transcript.
for beam in (1, 2, 4, 16):
    w, score = decode(enc, params, beam)
    print("beam %2d -> %s  log p = %.4f (rescored %.4f)" % (beam, w, score, sequence_log_prob(enc, w, params)))
