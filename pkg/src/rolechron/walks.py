"""Biased random walks over the multilayer context graph."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .context_graph import MultilayerContextGraph
from .rng import derived_rng


@dataclass
class WalkCorpus:
    walks: list  # list of node-id lists
    walks_per_node: int
    walk_length: int
    stay_probability: float
    seed: int
    stalled_nodes: frozenset = frozenset()  # nodes whose walks had to self-repeat


def _single_walk(ctx: MultilayerContextGraph, start, walk_length: int,
                 q: float, rng: np.random.Generator,
                 stalled: set, layer_trace: list | None = None) -> list:
    tokens = [start]
    node = start
    layer = 0
    if layer_trace is not None:
        layer_trace.append(layer)
    max_steps = walk_length * 100
    steps = 0
    while len(tokens) < walk_length and steps < max_steps:
        steps += 1
        if rng.random() < q:
            targets, _, cum = ctx.layers[layer].neighbors[node]
            if not targets:
                stalled.add(node)
                tokens.append(node)
                continue
            pick = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
            node = targets[min(pick, len(targets) - 1)]
            tokens.append(node)
        else:
            up = ctx.up_weights.get((layer, node))
            down = 1.0 if layer > 0 else None
            if up is not None and down is not None:
                layer += 1 if rng.random() * (up + down) < up else -1
            elif up is not None:
                layer += 1
            elif down is not None:
                layer -= 1
            # else: single-layer graph, stay put
        if layer_trace is not None:
            layer_trace.append(layer)
    return tokens


def generate_walks(ctx: MultilayerContextGraph, walks_per_node: int,
                   walk_length: int, q: float, seed: int) -> WalkCorpus:
    """walks_per_node walks of walk_length tokens from each node's layer-0 copy.

    With probability q the walker takes an intra-layer step (neighbor chosen
    proportionally to edge weight, node recorded); otherwise it moves up or
    down a layer proportionally to the inter-layer weights, recording nothing.
    Each walk owns an RNG derived from (seed, walk index), so the corpus is
    reproducible and walks are independent.
    """
    if walks_per_node < 1 or walk_length < 1:
        raise ValueError("walks_per_node and walk_length must be positive")
    if not (0 < q <= 1):
        raise ValueError("stay probability q must be in (0, 1]")
    stalled: set = set()
    walks = []
    idx = 0
    for _ in range(walks_per_node):
        for node in ctx.nodes:
            rng = derived_rng(seed, idx)
            walks.append(_single_walk(ctx, node, walk_length, q, rng, stalled))
            idx += 1
    return WalkCorpus(walks=walks, walks_per_node=walks_per_node,
                      walk_length=walk_length, stay_probability=q,
                      seed=seed, stalled_nodes=frozenset(stalled))
