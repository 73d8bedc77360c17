"""Multilayer context graph: one layer per hop depth, similarity-weighted edges."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distances import StructuralDistanceTable


@dataclass
class LayerAdjacency:
    """Intra-layer neighborhood lists with sampling-ready cumulative weights."""

    neighbors: dict = field(default_factory=dict)  # u -> (node list, weight array, cum array)
    mean_weight: float = 0.0

    def add(self, u, targets: list, weights: np.ndarray):
        self.neighbors[u] = (targets, weights, np.cumsum(weights))


@dataclass
class MultilayerContextGraph:
    layers: list  # LayerAdjacency per layer 0..K
    up_weights: dict  # (layer, node) -> log(gamma + e); present iff node exists above
    nodes: list
    degenerate: bool = False

    @property
    def depth(self) -> int:
        return len(self.layers)


def build_context_graph(distances: StructuralDistanceTable,
                        nodes=None,
                        node_order=None) -> MultilayerContextGraph:
    """Intra-layer weights exp(-f_k); inter-layer up-weights log(Gamma_k + e).

    Gamma_k(u) counts intra-layer edges at u whose weight exceeds the layer's
    average edge weight; the down-weight is the constant 1. Pass `nodes` to
    keep pairless nodes (e.g. a single-node graph, degenerate but valid).
    `node_order` fixes the canonical ordering used for walk starts and
    neighbor lists, making RNG consumption label-independent downstream.
    """
    if nodes is None:
        nodes = {n for pair in distances.table for n in pair}
    if node_order is not None:
        rank = {u: i for i, u in enumerate(node_order)}
        missing = set(nodes) - set(rank)
        if missing:
            raise ValueError(f"node_order misses nodes: {sorted(missing)}")
        nodes = sorted(nodes, key=rank.__getitem__)
    else:
        rank = None
        nodes = sorted(nodes)
    if not nodes:
        raise ValueError("empty distance table and no node list")

    layer_edges: list[dict] = []
    for k in range(distances.k_max + 1):
        edges = {}
        for (u, v), values in distances.table.items():
            if k < len(values):
                edges[(u, v)] = math.exp(-float(values[k]))
        if not edges:
            break
        layer_edges.append(edges)
    if not layer_edges:
        # isolated pairless graph: single layer with no edges
        layer_edges.append({})

    nodes_at_layer = [set(nodes)]  # every node has a layer-0 copy
    for edges in layer_edges[1:]:
        nodes_at_layer.append({n for pair in edges for n in pair})

    layers = []
    up_weights = {}
    for k, edges in enumerate(layer_edges):
        adj = LayerAdjacency()
        per_node: dict = {}
        for (u, v), w in edges.items():
            per_node.setdefault(u, []).append((v, w))
            per_node.setdefault(v, []).append((u, w))
        mean_w = (sum(edges.values()) / len(edges)) if edges else 0.0
        adj.mean_weight = mean_w
        for u in nodes_at_layer[k]:
            nbrs = sorted(per_node.get(u, []),
                          key=(lambda tw: (rank[tw[0]], tw[1])) if rank else None)
            targets = [t for t, _ in nbrs]
            weights = np.array([w for _, w in nbrs], dtype=float)
            adj.add(u, targets, weights)
            if k + 1 < len(layer_edges) and u in nodes_at_layer[k + 1]:
                gamma = int((weights > mean_w).sum())
                up_weights[(k, u)] = math.log(gamma + math.e)
        layers.append(adj)

    return MultilayerContextGraph(
        layers=layers,
        up_weights=up_weights,
        nodes=nodes,
        degenerate=len(nodes) < 2,
    )
