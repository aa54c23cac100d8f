"""Compiled inner loops for negative-sampling training and inference.

Everything here is numba-jitted and GIL-free so that worker threads can
update the shared float32 matrices concurrently (lost updates are
tolerated; see the trainer's concurrency notes). Randomness comes from a
self-contained xorshift64* generator seeded per (seed, epoch, document),
which makes the stream for a document independent of worker count and
bit-reproducible at workers=1.

Float discipline: matrices are float32; logits, learning rates, and
losses are accumulated in float64; the scalar applied to vector updates
is rounded to float32 first. The reference implementations in tests
mirror these rules exactly.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_SH12 = np.uint64(12)
_SH25 = np.uint64(25)
_SH27 = np.uint64(27)
_SH11 = np.uint64(11)
_SH30 = np.uint64(30)
_SH31 = np.uint64(31)
_STAR = np.uint64(2685821657736338717)
_MIX_C1 = np.uint64(0x9E3779B97F4A7C15)
_MIX_C2 = np.uint64(0xBF58476D1CE4E5B9)
_MIX_C3 = np.uint64(0x94D049BB133111EB)
_TWO_NEG53 = 2.0 ** -53


@njit(inline="always")
def _step(x):
    x ^= x >> _SH12
    x ^= x << _SH25
    x ^= x >> _SH27
    return x


@njit(inline="always")
def _value(x):
    return np.float64((x * _STAR) >> _SH11) * _TWO_NEG53


@njit(inline="always")
def _uniform(rs):
    x = _step(rs[0])
    rs[0] = x
    return _value(x)


@njit(inline="always")
def _mix64(z):
    z = (z ^ (z >> _SH30)) * _MIX_C2
    z = (z ^ (z >> _SH27)) * _MIX_C3
    return z ^ (z >> _SH31)


@njit("uint64(uint64, int64, int64)", cache=True)
def seed_state(seed, epoch, doc):
    """Derive a nonzero generator state from (seed, epoch, doc)."""
    z = _mix64(np.uint64(seed) + _MIX_C1)
    z = _mix64(z + np.uint64(epoch) + _MIX_C1)
    z = _mix64(z + np.uint64(doc) + _MIX_C1)
    if z == np.uint64(0):
        z = _MIX_C1
    return z


@njit("Tuple((uint64, float64))(uint64)", cache=True)
def rng_next(state):
    """Advance the generator once; return (new_state, uniform in [0, 1))."""
    x = _step(state)
    return x, _value(x)


@njit(inline="always")
def _search_cum(cum, u):
    """First index i with u < cum[i]; cum is an increasing array ending at 1."""
    lo = 0
    hi = cum.shape[0] - 1
    while lo < hi:
        mid = (lo + hi) >> 1
        if u < cum[mid]:
            hi = mid
        else:
            lo = mid + 1
    return lo


@njit(inline="always")
def _softplus(x):
    if x <= 0.0:
        return math.log1p(math.exp(x))
    return x + math.log1p(math.exp(-x))


@njit(inline="always")
def _sigmoid(x):
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


@njit(inline="always")
def _pair_update(l1, w_out, center, cum, n_neg, rs, lr, neu1e):
    """One positive target plus sampled negatives against input vector l1.

    Accumulates the gradient step for l1 into neu1e (caller zeroes it and
    applies it) and updates the touched w_out rows in place, using each
    row's pre-update values for neu1e. Negative draws that hit the
    positive target are skipped. Returns the pair's objective value.
    """
    dim = l1.shape[0]
    loss = 0.0
    for d in range(n_neg + 1):
        if d == 0:
            target = center
            label = 1.0
        else:
            target = _search_cum(cum, _uniform(rs))
            if target == center:
                continue
            label = 0.0
        row = w_out[target]
        z = 0.0
        for j in range(dim):
            z += row[j] * l1[j]
        if label > 0.0:
            loss += _softplus(-z)
        else:
            loss += _softplus(z)
        g = np.float32((label - _sigmoid(z)) * lr)
        for j in range(dim):
            neu1e[j] += g * row[j]
            row[j] += g * l1[j]
    return loss


@njit(inline="always")
def _pair_grad(l1, w_out, center, cum, n_neg, rs, lr, neu1e):
    """Like _pair_update but with w_out frozen (inference path)."""
    dim = l1.shape[0]
    loss = 0.0
    for d in range(n_neg + 1):
        if d == 0:
            target = center
            label = 1.0
        else:
            target = _search_cum(cum, _uniform(rs))
            if target == center:
                continue
            label = 0.0
        row = w_out[target]
        z = 0.0
        for j in range(dim):
            z += row[j] * l1[j]
        if label > 0.0:
            loss += _softplus(-z)
        else:
            loss += _softplus(z)
        g = np.float32((label - _sigmoid(z)) * lr)
        for j in range(dim):
            neu1e[j] += g * row[j]
    return loss


@njit(inline="always")
def _doc_alpha(lr_initial, lr_final, epoch, epochs, total_tokens, done_tokens):
    progress = (epoch * total_tokens + done_tokens) / (epochs * total_tokens)
    alpha = lr_initial - (lr_initial - lr_final) * progress
    if alpha < lr_final:
        alpha = lr_final
    return alpha


@njit(inline="always")
def _max_doc_len(doc_starts, docs):
    m = 1
    for k in range(docs.shape[0]):
        d = docs[k]
        n = doc_starts[d + 1] - doc_starts[d]
        if n > m:
            m = n
    return m


@njit(cache=True, nogil=True)
def skipgram_epoch(
    w_in,
    w_out,
    tokens_flat,
    doc_starts,
    docs,
    keep_prob,
    cum,
    window,
    n_neg,
    lr_initial,
    lr_final,
    total_tokens,
    prefix_tokens,
    epoch,
    epochs,
    seed,
    subsample,
):
    """One pass over a document shard: each surviving context word's input
    vector predicts the centre word. Returns (objective sum, pair count)."""
    dim = w_in.shape[1]
    sen = np.empty(_max_doc_len(doc_starts, docs), dtype=np.int32)
    neu1e = np.empty(dim, dtype=np.float32)
    rs = np.empty(1, dtype=np.uint64)
    loss = 0.0
    pairs = 0
    for k in range(docs.shape[0]):
        d = docs[k]
        rs[0] = seed_state(seed, epoch, d)
        m = 0
        for i in range(doc_starts[d], doc_starts[d + 1]):
            w = tokens_flat[i]
            if subsample and _uniform(rs) >= keep_prob[w]:
                continue
            sen[m] = w
            m += 1
        alpha = _doc_alpha(lr_initial, lr_final, epoch, epochs, total_tokens, prefix_tokens[d])
        for pos in range(m):
            center = sen[pos]
            b = 1 + int(_uniform(rs) * window)
            lo = pos - b
            if lo < 0:
                lo = 0
            hi = pos + b + 1
            if hi > m:
                hi = m
            for cpos in range(lo, hi):
                if cpos == pos:
                    continue
                l1 = w_in[sen[cpos]]
                for j in range(dim):
                    neu1e[j] = 0.0
                loss += _pair_update(l1, w_out, center, cum, n_neg, rs, alpha, neu1e)
                pairs += 1
                for j in range(dim):
                    l1[j] += neu1e[j]
    return loss, pairs


@njit(cache=True, nogil=True)
def context_epoch(
    w_in,
    w_out,
    doc_vecs,
    label_vecs,
    doc_label_row,
    use_doc,
    use_label,
    tokens_flat,
    doc_starts,
    docs,
    keep_prob,
    cum,
    window,
    n_neg,
    lr_initial,
    lr_final,
    total_tokens,
    prefix_tokens,
    epoch,
    epochs,
    seed,
    subsample,
):
    """One pass where the mean of (context words [+ doc vector] [+ label
    vector]) predicts the centre word; every contributor receives the exact
    mean gradient (neu1e / contributor count)."""
    dim = w_in.shape[1]
    sen = np.empty(_max_doc_len(doc_starts, docs), dtype=np.int32)
    l1 = np.empty(dim, dtype=np.float32)
    neu1e = np.empty(dim, dtype=np.float32)
    rs = np.empty(1, dtype=np.uint64)
    loss = 0.0
    pairs = 0
    for k in range(docs.shape[0]):
        d = docs[k]
        lrow = doc_label_row[d]
        rs[0] = seed_state(seed, epoch, d)
        m = 0
        for i in range(doc_starts[d], doc_starts[d + 1]):
            w = tokens_flat[i]
            if subsample and _uniform(rs) >= keep_prob[w]:
                continue
            sen[m] = w
            m += 1
        alpha = _doc_alpha(lr_initial, lr_final, epoch, epochs, total_tokens, prefix_tokens[d])
        for pos in range(m):
            center = sen[pos]
            b = 1 + int(_uniform(rs) * window)
            lo = pos - b
            if lo < 0:
                lo = 0
            hi = pos + b + 1
            if hi > m:
                hi = m
            count = 0
            for j in range(dim):
                l1[j] = 0.0
            for cpos in range(lo, hi):
                if cpos == pos:
                    continue
                row = w_in[sen[cpos]]
                for j in range(dim):
                    l1[j] += row[j]
                count += 1
            if use_doc:
                row = doc_vecs[d]
                for j in range(dim):
                    l1[j] += row[j]
                count += 1
            if use_label:
                row = label_vecs[lrow]
                for j in range(dim):
                    l1[j] += row[j]
                count += 1
            if count == 0:
                continue
            inv = np.float32(1.0) / np.float32(count)
            for j in range(dim):
                l1[j] *= inv
            for j in range(dim):
                neu1e[j] = 0.0
            loss += _pair_update(l1, w_out, center, cum, n_neg, rs, alpha, neu1e)
            pairs += 1
            for cpos in range(lo, hi):
                if cpos == pos:
                    continue
                row = w_in[sen[cpos]]
                for j in range(dim):
                    row[j] += neu1e[j] * inv
            if use_doc:
                row = doc_vecs[d]
                for j in range(dim):
                    row[j] += neu1e[j] * inv
            if use_label:
                row = label_vecs[lrow]
                for j in range(dim):
                    row[j] += neu1e[j] * inv
    return loss, pairs


@njit(cache=True, nogil=True)
def dbow_epoch(
    w_out,
    doc_vecs,
    label_vecs,
    doc_label_row,
    use_label,
    tokens_flat,
    doc_starts,
    docs,
    keep_prob,
    cum,
    n_neg,
    lr_initial,
    lr_final,
    total_tokens,
    prefix_tokens,
    epoch,
    epochs,
    seed,
    subsample,
):
    """One pass where the document vector (and, separately, its label
    vector) predicts each surviving word with no context window."""
    dim = doc_vecs.shape[1]
    neu1e = np.empty(dim, dtype=np.float32)
    rs = np.empty(1, dtype=np.uint64)
    loss = 0.0
    pairs = 0
    for k in range(docs.shape[0]):
        d = docs[k]
        lrow = doc_label_row[d]
        rs[0] = seed_state(seed, epoch, d)
        alpha = _doc_alpha(lr_initial, lr_final, epoch, epochs, total_tokens, prefix_tokens[d])
        for i in range(doc_starts[d], doc_starts[d + 1]):
            w = tokens_flat[i]
            if subsample and _uniform(rs) >= keep_prob[w]:
                continue
            dl1 = doc_vecs[d]
            for j in range(dim):
                neu1e[j] = 0.0
            loss += _pair_update(dl1, w_out, w, cum, n_neg, rs, alpha, neu1e)
            pairs += 1
            for j in range(dim):
                dl1[j] += neu1e[j]
            if use_label:
                ll1 = label_vecs[lrow]
                for j in range(dim):
                    neu1e[j] = 0.0
                loss += _pair_update(ll1, w_out, w, cum, n_neg, rs, alpha, neu1e)
                pairs += 1
                for j in range(dim):
                    ll1[j] += neu1e[j]
    return loss, pairs


@njit(cache=True, nogil=True)
def infer_context_steps(
    vec,
    w_in,
    w_out,
    tokens,
    cum,
    window,
    n_neg,
    lr_initial,
    lr_final,
    steps,
    seed,
):
    """Gradient passes for a fresh document vector under a frozen
    mean-of-context model: only vec is updated."""
    dim = vec.shape[0]
    n = tokens.shape[0]
    l1 = np.empty(dim, dtype=np.float32)
    neu1e = np.empty(dim, dtype=np.float32)
    rs = np.empty(1, dtype=np.uint64)
    for step in range(steps):
        rs[0] = seed_state(seed, step, 0)
        alpha = lr_initial - (lr_initial - lr_final) * (step / steps)
        if alpha < lr_final:
            alpha = lr_final
        for pos in range(n):
            center = tokens[pos]
            b = 1 + int(_uniform(rs) * window)
            lo = pos - b
            if lo < 0:
                lo = 0
            hi = pos + b + 1
            if hi > n:
                hi = n
            count = 1
            for j in range(dim):
                l1[j] = vec[j]
            for cpos in range(lo, hi):
                if cpos == pos:
                    continue
                row = w_in[tokens[cpos]]
                for j in range(dim):
                    l1[j] += row[j]
                count += 1
            inv = np.float32(1.0) / np.float32(count)
            for j in range(dim):
                l1[j] *= inv
            for j in range(dim):
                neu1e[j] = 0.0
            _pair_grad(l1, w_out, center, cum, n_neg, rs, alpha, neu1e)
            for j in range(dim):
                vec[j] += neu1e[j] * inv


@njit(cache=True, nogil=True)
def infer_dbow_steps(
    vec,
    w_out,
    tokens,
    cum,
    n_neg,
    lr_initial,
    lr_final,
    steps,
    seed,
):
    """Gradient passes for a fresh document vector under a frozen
    bag-of-words model: vec alone predicts each token."""
    dim = vec.shape[0]
    neu1e = np.empty(dim, dtype=np.float32)
    rs = np.empty(1, dtype=np.uint64)
    for step in range(steps):
        rs[0] = seed_state(seed, step, 0)
        alpha = lr_initial - (lr_initial - lr_final) * (step / steps)
        if alpha < lr_final:
            alpha = lr_final
        for pos in range(tokens.shape[0]):
            for j in range(dim):
                neu1e[j] = 0.0
            _pair_grad(vec, w_out, tokens[pos], cum, n_neg, rs, alpha, neu1e)
            for j in range(dim):
                vec[j] += neu1e[j]
