import itertools
import math

import numpy as np
import pytest

from conftest import random_log_emissions
from fingerspell.ctc import (
    InfeasibleTranscriptError,
    check_emissions,
    ctc_loss_grad,
    emissions,
    greedy_decode,
    label_log_prob,
    log_softmax,
    path_log_prob,
)
from oracles import ctc_enumerate, softmax_ref

# two-symbol alphabet {a, blank}
TOY = np.log(np.array([[0.6, 0.4], [0.5, 0.5]]))


def test_emissions_zero_params_uniform():
    em = emissions(np.ones((3, 4)), np.zeros((32, 4)), np.zeros(32))
    np.testing.assert_allclose(em, np.log(1 / 32))


def test_emissions_saturate():
    bias = np.zeros(32)
    bias[5] = 100.0
    em = emissions(np.ones((2, 3)), np.zeros((32, 3)), bias)
    assert np.exp(em[:, 5]) == pytest.approx([1.0, 1.0])


def test_emissions_match_softmax_oracle(rng):
    W, bias = rng.normal(size=(3, 6)), rng.normal(size=3)
    feats = rng.normal(size=(2, 6))
    em = emissions(feats, W, bias)
    for t in range(2):
        logits = [float(W[k] @ feats[t] + bias[k]) for k in range(3)]
        np.testing.assert_allclose(np.exp(em[t]), softmax_ref(logits), atol=1e-12, rtol=0)
    check_emissions(em)


def test_emissions_dimension_mismatch():
    with pytest.raises(ValueError):
        emissions(np.ones((2, 3)), np.zeros((32, 4)), np.zeros(32))
    with pytest.raises(ValueError):
        emissions(np.ones((2, 4)), np.zeros((32, 4)), np.zeros(31))


def test_log_softmax_stable_for_huge_logits():
    out = log_softmax(np.array([1000.0, 0.0, -1000.0]))
    np.testing.assert_allclose(out, [0.0, -1000.0, -2000.0])


def test_path_log_prob():
    em = TOY
    assert path_log_prob(em[:1], [0]) == pytest.approx(math.log(0.6))
    assert path_log_prob(em, [0, 1]) == pytest.approx(math.log(0.30))
    uni = np.full((5, 32), math.log(1 / 32))
    assert path_log_prob(uni, [3, 31, 31, 7, 0]) == pytest.approx(5 * math.log(1 / 32))
    with pytest.raises(ValueError):
        path_log_prob(em, [0])


def test_label_log_prob_toy():
    assert math.exp(label_log_prob(TOY, (0,))) == pytest.approx(0.8)
    assert math.exp(label_log_prob(TOY, ())) == pytest.approx(0.2)
    assert label_log_prob(TOY, (0, 0)) == -math.inf


@pytest.mark.parametrize("seed", range(30))
def test_label_log_prob_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    T, K = int(rng.integers(1, 6)), int(rng.integers(2, 4))
    em = random_log_emissions(rng, T, K)
    ref = ctc_enumerate(np.exp(em), K - 1)
    for n in range(T + 1):
        for w in itertools.product(range(K - 1), repeat=n):
            got = label_log_prob(em, w)
            if w in ref:
                assert got == pytest.approx(math.log(ref[w]), rel=1e-10)
            else:
                assert got == -math.inf


def test_label_log_prob_non_last_blank(rng):
    em = random_log_emissions(rng, 4, 3)
    ref = ctc_enumerate(np.exp(em), 0)
    assert label_log_prob(em, (1, 2), blank=0) == pytest.approx(math.log(ref[(1, 2)]))


def test_label_log_prob_long_sequence_no_underflow(rng):
    em = random_log_emissions(rng, 400, 32, alpha=0.2)
    w = tuple(int(x) for x in rng.integers(0, 31, size=40))
    val = label_log_prob(em, w)
    assert np.isfinite(val) and val < -100


def test_feasibility_boundary(rng):
    w = (0, 0, 1)  # needs 4 frames
    assert label_log_prob(random_log_emissions(rng, 3, 3), w) == -math.inf
    assert np.isfinite(label_log_prob(random_log_emissions(rng, 4, 3), w))


def _loss_from_logits(logits, w):
    return -label_log_prob(log_softmax(logits), w)


@pytest.mark.parametrize("seed", range(10))
def test_gradient_finite_differences(seed):
    rng = np.random.default_rng(seed)
    logits = rng.normal(size=(5, 5))
    w = tuple(int(x) for x in rng.integers(0, 4, size=int(rng.integers(0, 3))))
    loss, grad = ctc_loss_grad(log_softmax(logits), w)
    assert loss == pytest.approx(_loss_from_logits(logits, w))
    h = 1e-5
    num = np.zeros_like(logits)
    for idx in np.ndindex(*logits.shape):
        up, dn = logits.copy(), logits.copy()
        up[idx] += h
        dn[idx] -= h
        num[idx] = (_loss_from_logits(up, w) - _loss_from_logits(dn, w)) / (2 * h)
    rel = np.abs(grad - num) / np.maximum(np.abs(num), 1e-6)
    assert rel.max() < 1e-4
    np.testing.assert_allclose(grad.sum(axis=1), 0.0, atol=1e-9)


def test_gradient_at_optimum():
    K = 4
    path = [0, 0, 3, 1]  # a a - b
    em = np.full((4, K), -np.inf)
    em[np.arange(4), path] = 0.0
    loss, grad = ctc_loss_grad(em, (0, 1))
    assert loss == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(grad, 0.0, atol=1e-12)


def test_gradient_infeasible_raises(rng):
    with pytest.raises(InfeasibleTranscriptError):
        ctc_loss_grad(random_log_emissions(rng, 2, 3), (0, 0))


def test_greedy_examples():
    K = 3
    em = np.full((4, K), np.log(1e-12))
    for t, k in enumerate([0, 0, 2, 1]):
        em[t, k] = 0.0
    assert greedy_decode(em) == (0, 1)
    uni = np.full((3, 32), math.log(1 / 32))
    assert greedy_decode(uni) == (0,)


@pytest.mark.parametrize("seed", range(10))
def test_greedy_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    em = random_log_emissions(rng, 4, 32)
    best = [max(range(32), key=lambda k: em[t, k]) for t in range(4)]
    merged = [k for i, k in enumerate(best) if i == 0 or k != best[i - 1]]
    assert greedy_decode(em) == tuple(k for k in merged if k != 31)


def test_check_emissions_rejects_unnormalised():
    with pytest.raises(ValueError):
        check_emissions(np.zeros((2, 3)))
