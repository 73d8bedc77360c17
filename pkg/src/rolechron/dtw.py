"""Dynamic time warping over ordered degree sequences.

Element cost is the ratio gap max(a, b) / min(a, b) - 1, which keeps the
distance scale-free: doubling every degree leaves costs unchanged.
"""

from __future__ import annotations

import numpy as np

# stand-in degree when one side of a comparison has nothing at a hop ring
NEUTRAL_DEGREE = 1.0


def _pair_cost(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    hi = np.maximum(a, b)
    lo = np.minimum(a, b)
    return hi / lo - 1.0


def dtw_distance(seq_a, seq_b) -> float:
    """Classical DTW alignment cost between two positive ascending sequences.

    An empty sequence is handled by pairing every element of the other
    sequence against the neutral degree 1 (degenerate-ring convention).
    Non-positive entries are rejected.
    """
    a = np.asarray(seq_a, dtype=float)
    b = np.asarray(seq_b, dtype=float)
    if a.size and a.min() <= 0:
        raise ValueError("non-positive entry in first sequence")
    if b.size and b.min() <= 0:
        raise ValueError("non-positive entry in second sequence")
    if a.size == 0 and b.size == 0:
        return 0.0
    if a.size == 0:
        return float(_pair_cost(np.full_like(b, NEUTRAL_DEGREE), b).sum())
    if b.size == 0:
        return float(_pair_cost(a, np.full_like(a, NEUTRAL_DEGREE)).sum())

    n, m = a.size, b.size
    cost = _pair_cost(a[:, None], b[None, :])
    acc = np.full((n + 1, m + 1), np.inf)
    acc[0, 0] = 0.0
    for i in range(1, n + 1):
        row = acc[i]
        prev = acc[i - 1]
        for j in range(1, m + 1):
            row[j] = cost[i - 1, j - 1] + min(prev[j], row[j - 1], prev[j - 1])
    return float(acc[n, m])


def dtw_distance_bruteforce(seq_a, seq_b) -> float:
    """Exhaustive minimum over all monotone alignments; test oracle only.

    Exponential; intended for sequences of length <= ~6.
    """
    a = np.asarray(seq_a, dtype=float)
    b = np.asarray(seq_b, dtype=float)
    if a.size == 0 or b.size == 0:
        return dtw_distance(seq_a, seq_b)
    best = [np.inf]

    def walk(i: int, j: int, total: float):
        total += _pair_cost(a[i], b[j])
        if total >= best[0]:
            return
        if i == a.size - 1 and j == b.size - 1:
            best[0] = total
            return
        if i + 1 < a.size:
            walk(i + 1, j, total)
        if j + 1 < b.size:
            walk(i, j + 1, total)
        if i + 1 < a.size and j + 1 < b.size:
            walk(i + 1, j + 1, total)

    walk(0, 0, 0.0)
    return float(best[0])
