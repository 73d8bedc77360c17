"""Per-node hop-ring degree sequences, the raw material for structural distances."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .graph_core import InteractionGraph

DEFAULT_MAX_HOPS = 5


@dataclass(frozen=True)
class DegreeSequenceProfile:
    """For each node, one (in-strength, out-strength) sequence pair per hop ring.

    Sequences are ascending; ring 0 is the node itself. A node's ring list
    stops at its eccentricity, so lengths differ across nodes.
    """

    rings: dict  # node -> list of (in_seq, out_seq) ndarray pairs
    k_max: int

    def ring(self, node, k: int):
        """(in_seq, out_seq) at hop k, or None if the ring is empty."""
        node_rings = self.rings[node]
        if k >= len(node_rings):
            return None
        return node_rings[k]


def node_strengths(graph: InteractionGraph) -> tuple[dict, dict]:
    """(in_strength, out_strength) maps, self-loops excluded."""
    in_s = {u: 0.0 for u in graph.nodes}
    out_s = {u: 0.0 for u in graph.nodes}
    for (s, t), w in graph.edges.items():
        if s == t:
            continue
        out_s[s] += w
        in_s[t] += w
    return in_s, out_s


def degree_profiles(graph: InteractionGraph,
                    k_max: int | None = None) -> DegreeSequenceProfile:
    """BFS shells over the undirected skeleton, capped at k_max hops.

    k_max defaults to 5, the usual diameter cap for structural-distance layers.
    """
    if k_max is None:
        k_max = DEFAULT_MAX_HOPS
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    in_s, out_s = node_strengths(graph)
    adj = graph.undirected_neighbors()
    rings: dict = {}
    for start in graph.nodes:
        shells: list[list] = [[start]]
        seen = {start}
        frontier = deque([start])
        for _ in range(k_max):
            next_frontier: list = []
            while frontier:
                u = frontier.popleft()
                for v in adj[u]:
                    if v not in seen:
                        seen.add(v)
                        next_frontier.append(v)
            if not next_frontier:
                break
            shells.append(next_frontier)
            frontier = deque(next_frontier)
        rings[start] = [
            (np.sort(np.array([in_s[u] for u in shell], dtype=float)),
             np.sort(np.array([out_s[u] for u in shell], dtype=float)))
            for shell in shells
        ]
    return DegreeSequenceProfile(rings=rings, k_max=k_max)
