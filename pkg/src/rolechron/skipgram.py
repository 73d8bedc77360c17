"""Skip-gram with negative sampling, trained on walk corpora.

Single-threaded and deterministic for a fixed seed; the parallel pipeline
derives one seed per embedding task instead of sharing trainer state.
"""

from __future__ import annotations

from collections import Counter

import numpy as np

from .rng import derived_rng
from .walks import WalkCorpus

NOISE_EXPONENT = 0.75


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -30, 30)))


def train_skipgram(corpus: WalkCorpus, dim: int = 128, window: int = 10,
                   negatives: int = 5, epochs: int = 5,
                   alpha: float = 0.025, min_alpha: float = 1e-4,
                   seed: int = 0, node_order=None) -> tuple[list, np.ndarray]:
    """Train SGNS over the corpus; returns (vocabulary, embedding matrix).

    Positive pairs come from a per-center reduced window (uniform in
    [1, window]); negatives are drawn from the unigram^0.75 noise
    distribution. Learning rate decays linearly to min_alpha. The returned
    embedding is the sum of the input and output vectors, which keeps
    first-order co-occurrence information that the input vectors alone lose
    on small vocabularies. `node_order` fixes the vocabulary ordering (hence
    RNG consumption) to a canonical ranking instead of the lexicographic
    default.
    """
    if dim < 2:
        raise ValueError("embedding dimension must be >= 2")
    if not corpus.walks or all(len(w) == 0 for w in corpus.walks):
        raise ValueError("empty walk corpus")

    counts = Counter(tok for walk in corpus.walks for tok in walk)
    if node_order is not None:
        rank = {u: i for i, u in enumerate(node_order)}
        vocab = sorted(counts, key=rank.__getitem__)
    else:
        vocab = sorted(counts)
    tok2idx = {tok: i for i, tok in enumerate(vocab)}
    n = len(vocab)

    freq = np.array([counts[tok] for tok in vocab], dtype=float)
    noise = freq ** NOISE_EXPONENT
    noise_cdf = np.cumsum(noise / noise.sum())

    rng = derived_rng(seed, "sgns")
    w_in = (rng.random((n, dim)) - 0.5) / dim
    w_out = np.zeros((n, dim))

    walks_idx = [np.array([tok2idx[t] for t in walk], dtype=np.int64)
                 for walk in corpus.walks]
    total_centers = sum(len(w) for w in walks_idx) * epochs
    processed = 0

    lr_span = max(total_centers - 1, 1)
    for _ in range(epochs):
        for walk in walks_idx:
            length = len(walk)
            # per-walk randomness drawn in bulk; order matches the center loop
            bs = rng.integers(1, window + 1, size=length)
            los = np.maximum(0, np.arange(length) - bs)
            his = np.minimum(length, np.arange(length) + bs + 1)
            ctx_counts = his - los - 1
            negs_all = np.searchsorted(
                noise_cdf, rng.random(int(ctx_counts.sum()) * negatives))
            neg_offsets = np.concatenate([[0], np.cumsum(ctx_counts * negatives)])

            for i in range(length):
                lr = alpha + (min_alpha - alpha) * (processed / lr_span)
                processed += 1
                lo, hi = los[i], his[i]
                ctx = np.concatenate([walk[lo:i], walk[i + 1:hi]])
                if ctx.size == 0:
                    continue
                negs = negs_all[neg_offsets[i]:neg_offsets[i + 1]]
                targets = np.concatenate([ctx, negs])
                labels = np.zeros(targets.size)
                labels[:ctx.size] = 1.0

                center = walk[i]
                v = w_in[center]
                u = w_out[targets]
                g = (labels - _sigmoid(u @ v)) * lr
                np.add.at(w_out, targets, g[:, None] * v[None, :])
                w_in[center] = v + g @ u

    return vocab, w_in + w_out
