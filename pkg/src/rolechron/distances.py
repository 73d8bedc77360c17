"""Cumulative structural distances between node pairs, layer by layer."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dtw import NEUTRAL_DEGREE, dtw_distance
from .profiles import DegreeSequenceProfile


@dataclass(frozen=True)
class StructuralDistanceTable:
    """f_k(u, v) per canonical pair; f cumulates DTW ring costs over hops.

    A pair's array ends at the last hop where both nodes still have a
    non-empty ring.
    """

    table: dict  # (u, v) with u < v -> ndarray of f_0..f_K
    k_max: int

    @staticmethod
    def key(u, v):
        return (u, v) if u <= v else (v, u)

    def f(self, u, v, k: int) -> float | None:
        if u == v:
            return 0.0
        values = self.table.get(self.key(u, v))
        if values is None or k >= len(values):
            return None
        return float(values[k])

    def max_layer(self, u, v) -> int:
        if u == v:
            return self.k_max
        values = self.table.get(self.key(u, v))
        return -1 if values is None else len(values) - 1


def _positive(seq: np.ndarray) -> np.ndarray:
    # zero in/out-strengths happen in directed graphs; the ratio cost needs
    # positive entries, so zeros take the neutral degree
    if seq.size and seq.min() <= 0:
        seq = np.where(seq <= 0, NEUTRAL_DEGREE, seq)
    return seq


def candidate_pairs(profiles: DegreeSequenceProfile,
                    m: int | None = None) -> set:
    """Top-m structurally plausible pairs per node, by hop-0 strength closeness.

    m defaults to ceil(2 * ln n); pass None through structural_distances with
    sparsify=False for exact all-pairs mode.
    """
    nodes = sorted(profiles.rings)
    n = len(nodes)
    if m is None:
        m = max(1, math.ceil(2 * math.log(max(n, 2))))
    totals = {}
    for u in nodes:
        in_seq, out_seq = profiles.rings[u][0]
        totals[u] = float(in_seq.sum() + out_seq.sum())
    order = sorted(nodes, key=lambda u: (totals[u], u))
    index = {u: i for i, u in enumerate(order)}
    pairs = set()
    for u in nodes:
        i = index[u]
        lo, hi = i - 1, i + 1
        taken = 0
        # closest by strength on either side of u in sorted order
        while taken < m and (lo >= 0 or hi < n):
            if hi >= n or (lo >= 0 and totals[u] - totals[order[lo]] <= totals[order[hi]] - totals[u]):
                pairs.add(StructuralDistanceTable.key(u, order[lo]))
                lo -= 1
            else:
                pairs.add(StructuralDistanceTable.key(u, order[hi]))
                hi += 1
            taken += 1
    return pairs


def structural_distances(profiles: DegreeSequenceProfile,
                         pairs=None,
                         sparsify: bool = False,
                         sparsify_m: int | None = None) -> StructuralDistanceTable:
    """f_k(u,v) = f_{k-1}(u,v) + dtw(in rings) + dtw(out rings), per pair.

    Exact all-pairs by default; sparsify=True restricts to the top-m
    strength-similar candidate pairs per node.
    """
    nodes = sorted(profiles.rings)
    if pairs is None:
        if sparsify:
            pairs = candidate_pairs(profiles, sparsify_m)
        else:
            pairs = {(u, v) for i, u in enumerate(nodes) for v in nodes[i + 1:]}
    table: dict = {}
    for (u, v) in pairs:
        ru, rv = profiles.rings[u], profiles.rings[v]
        depth = min(len(ru), len(rv))
        values = np.empty(depth)
        total = 0.0
        for k in range(depth):
            total += dtw_distance(_positive(ru[k][0]), _positive(rv[k][0]))
            total += dtw_distance(_positive(ru[k][1]), _positive(rv[k][1]))
            values[k] = total
        table[StructuralDistanceTable.key(u, v)] = values
    return StructuralDistanceTable(table=table, k_max=profiles.k_max)
