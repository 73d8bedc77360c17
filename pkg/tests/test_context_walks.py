import math

import pytest

from rolechron.context_graph import build_context_graph
from rolechron.distances import StructuralDistanceTable, structural_distances
from rolechron.graph_core import InteractionGraph
from rolechron.profiles import degree_profiles
from rolechron.rng import derived_rng
from rolechron.walks import _single_walk, generate_walks


def star_table():
    edges = []
    for leaf in ("l1", "l2", "l3"):
        edges += [("c", leaf, 1.0), (leaf, "c", 1.0)]
    g = InteractionGraph.from_edges(edges)
    return structural_distances(degree_profiles(g, 2))


class TestContextGraph:
    def test_zero_distance_gives_weight_one(self):
        ctx = build_context_graph(star_table())
        targets, weights, _ = ctx.layers[0].neighbors["l1"]
        w = dict(zip(targets, weights))
        assert w["l2"] == pytest.approx(1.0)
        assert w["l3"] == pytest.approx(1.0)

    def test_exp_of_distance(self):
        ctx = build_context_graph(star_table())
        targets, weights, _ = ctx.layers[0].neighbors["c"]
        w = dict(zip(targets, weights))
        assert w["l1"] == pytest.approx(math.exp(-4.0))

    def test_gamma_zero_gives_unit_up_weight(self):
        # center's intra-layer weights are all below the layer average,
        # so Gamma = 0 and the up-weight is log(e) = 1
        ctx = build_context_graph(star_table())
        assert ctx.up_weights[(0, "c")] == pytest.approx(1.0)
        # leaves have edges above average: up-weight exceeds 1
        assert ctx.up_weights[(0, "l1")] > 1.0

    def test_weights_in_unit_interval_and_symmetric(self):
        ctx = build_context_graph(star_table())
        for layer in ctx.layers:
            for u, (targets, weights, _) in layer.neighbors.items():
                for t, w in zip(targets, weights):
                    assert 0 < w <= 1
                    back_targets, back_weights, _ = layer.neighbors[t]
                    assert back_weights[back_targets.index(u)] == pytest.approx(w)

    def test_single_node_graph_degenerate(self):
        table = StructuralDistanceTable(table={}, k_max=0)
        ctx = build_context_graph(table, nodes=["only"])
        assert ctx.degenerate
        assert ctx.nodes == ["only"]


class TestWalks:
    def two_node_ctx(self):
        g = InteractionGraph.from_edges([("u", "v", 1), ("v", "u", 1)])
        return build_context_graph(structural_distances(degree_profiles(g, 1)))

    def test_q1_alternates_between_two_nodes(self):
        corpus = generate_walks(self.two_node_ctx(), 2, 8, q=1.0, seed=0)
        for walk in corpus.walks:
            for a, b in zip(walk, walk[1:]):
                assert {a, b} == {"u", "v"}

    def test_corpus_size_contract(self):
        ctx = build_context_graph(star_table())
        corpus = generate_walks(ctx, 10, 5, q=0.7, seed=1)
        assert len(corpus.walks) == 10 * len(ctx.nodes)
        assert all(len(w) <= 5 for w in corpus.walks)

    def test_same_seed_identical_corpora(self):
        ctx = build_context_graph(star_table())
        c1 = generate_walks(ctx, 5, 20, q=0.7, seed=42)
        c2 = generate_walks(ctx, 5, 20, q=0.7, seed=42)
        assert c1.walks == c2.walks

    def test_different_seed_differs(self):
        ctx = build_context_graph(star_table())
        c1 = generate_walks(ctx, 5, 20, q=0.7, seed=1)
        c2 = generate_walks(ctx, 5, 20, q=0.7, seed=2)
        assert c1.walks != c2.walks

    def test_q1_never_changes_layer(self):
        ctx = build_context_graph(star_table())
        trace = []
        _single_walk(ctx, "c", 30, q=1.0, rng=derived_rng(0, 0),
                     stalled=set(), layer_trace=trace)
        assert set(trace) == {0}

    def test_isolated_node_repeats_self_and_flags(self):
        table = StructuralDistanceTable(table={}, k_max=0)
        ctx = build_context_graph(table, nodes=["solo"])
        corpus = generate_walks(ctx, 1, 4, q=1.0, seed=0)
        assert corpus.walks == [["solo"] * 4]
        assert "solo" in corpus.stalled_nodes

    def test_tokens_are_valid_nodes(self):
        ctx = build_context_graph(star_table())
        corpus = generate_walks(ctx, 3, 15, q=0.5, seed=7)
        valid = set(ctx.nodes)
        assert all(tok in valid for walk in corpus.walks for tok in walk)

    def test_parameter_validation(self):
        ctx = self.two_node_ctx()
        with pytest.raises(ValueError):
            generate_walks(ctx, 0, 5, q=0.5, seed=0)
        with pytest.raises(ValueError):
            generate_walks(ctx, 1, 5, q=0.0, seed=0)
        with pytest.raises(ValueError):
            generate_walks(ctx, 1, 5, q=1.5, seed=0)
