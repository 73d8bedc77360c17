import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rolechron.graph_core import (EdgeListParseError, InteractionGraph,
                                  anchor_overlap, merge_months,
                                  parse_edge_list, snapshot_to_edge_lines,
                                  summarize, top_k_users)


def make_snapshot(edges, subreddit="sub", window=1, months=("m1",), label="unlabeled"):
    from rolechron.graph_core import TemporalSnapshot
    return TemporalSnapshot(subreddit=subreddit, class_label=label,
                            window_index=window, months_covered=tuple(months),
                            graph=InteractionGraph.from_edges(edges))


class TestParseEdgeList:
    def test_duplicate_pairs_merge_by_weight_sum(self):
        snap = parse_edge_list(["a,b,2", "b,a,1", "a,b,3"], "s", 1)
        assert snap.graph.edges == {("a", "b"): 5.0, ("b", "a"): 1.0}
        assert snap.graph.nodes == {"a", "b"}

    def test_empty_stream_sets_warning(self):
        snap = parse_edge_list([], "s", 1)
        assert snap.graph.node_count == 0
        assert snap.graph.edge_count == 0
        assert snap.empty_warning

    def test_non_numeric_weight_reports_line(self):
        with pytest.raises(EdgeListParseError) as err:
            parse_edge_list(["a,b,x"], "s", 1)
        assert err.value.line_number == 1

    def test_tab_delimiter_and_default_weight(self):
        snap = parse_edge_list(["a\tb", "b\tc\t2.5"], "s", 1)
        assert snap.graph.edges == {("a", "b"): 1.0, ("b", "c"): 2.5}

    def test_negative_weight_rejected(self):
        with pytest.raises(EdgeListParseError):
            parse_edge_list(["a,b,-1"], "s", 1)

    def test_wrong_field_count(self):
        with pytest.raises(EdgeListParseError) as err:
            parse_edge_list(["a,b,1", "a,b,c,d"], "s", 1)
        assert err.value.line_number == 2

    def test_roundtrip_idempotence(self):
        snap = parse_edge_list(["a,b,2", "c\ta\t0.5", "b,b,1"], "s", 1)
        lines = snapshot_to_edge_lines(snap)
        again = parse_edge_list(lines, "s", 1)
        assert again.graph.nodes == snap.graph.nodes
        assert again.graph.edges == snap.graph.edges


class TestMergeMonths:
    def test_additive_merge(self):
        a = make_snapshot([("a", "b", 1)], months=("feb",))
        b = make_snapshot([("a", "b", 2)], months=("mar",))
        c = make_snapshot([("b", "c", 1)], months=("apr",))
        merged = merge_months([a, b, c])
        assert merged.graph.edges == {("a", "b"): 3.0, ("b", "c"): 1.0}
        assert merged.months_covered == ("apr", "feb", "mar")

    def test_single_month_identity(self):
        a = make_snapshot([("a", "b", 1)], months=("feb",))
        merged = merge_months([a])
        assert merged.graph.edges == a.graph.edges

    def test_month_overlap_is_error(self):
        a = make_snapshot([("a", "b", 1)], months=("feb",))
        b = make_snapshot([("a", "c", 1)], months=("feb",))
        with pytest.raises(ValueError, match="overlap"):
            merge_months([a, b])

    def test_mixed_subreddits_is_error(self):
        a = make_snapshot([("a", "b", 1)], subreddit="x", months=("feb",))
        b = make_snapshot([("a", "b", 1)], subreddit="y", months=("mar",))
        with pytest.raises(ValueError, match="subreddit"):
            merge_months([a, b])

    @given(st.permutations(["feb", "mar", "apr"]))
    def test_order_independent(self, month_order):
        pieces = {
            "feb": make_snapshot([("a", "b", 1), ("c", "a", 2)], months=("feb",)),
            "mar": make_snapshot([("a", "b", 2)], months=("mar",)),
            "apr": make_snapshot([("b", "c", 1)], months=("apr",)),
        }
        merged = merge_months([pieces[m] for m in month_order])
        assert merged.graph.edges == {("a", "b"): 3.0, ("c", "a"): 2.0,
                                      ("b", "c"): 1.0}


class TestTopKUsers:
    def test_ordering_by_strength(self):
        snap = make_snapshot([("a", "b", 3), ("a", "c", 2), ("b", "c", 1)])
        # strengths: a=5, b=4, c=3
        top = top_k_users(snap, 2)
        assert top.users == ("a", "b")
        assert not top.shortfall

    def test_lexicographic_tie_break(self):
        snap = make_snapshot([("a", "b", 2)])
        top = top_k_users(snap, 1)
        assert top.users == ("a",)

    def test_shortfall_flag(self):
        snap = make_snapshot([("a", "b", 1), ("b", "c", 1)])
        top = top_k_users(snap, 100)
        assert set(top.users) == {"a", "b", "c"}
        assert top.shortfall

    def test_self_loops_excluded_by_default(self):
        snap = make_snapshot([("a", "a", 100), ("b", "c", 1)])
        top = top_k_users(snap, 1)
        assert top.users == ("b",)
        top_incl = top_k_users(snap, 1, include_self_loops=True)
        assert top_incl.users == ("a",)

    def test_degree_mode(self):
        snap = make_snapshot([("a", "b", 10), ("c", "a", 1), ("c", "b", 1), ("c", "d", 1)])
        assert top_k_users(snap, 1, score="degree").users == ("c",)
        assert top_k_users(snap, 1, score="strength").users == ("a",)

    @given(st.integers(min_value=1, max_value=5))
    def test_prefix_property(self, k):
        snap = make_snapshot([("a", "b", 3), ("c", "d", 2), ("e", "a", 1)])
        smaller = set(top_k_users(snap, k).users)
        bigger = set(top_k_users(snap, k + 1).users)
        assert smaller <= bigger


class TestAnchorOverlap:
    def test_intersection(self):
        result = anchor_overlap([{"a", "b", "c"}, {"b", "c", "d"}, {"c", "e"}])
        assert result.users == {"c"}
        assert not result.empty_warning

    def test_identical_sets(self):
        result = anchor_overlap([{"a", "b"}, {"a", "b"}])
        assert result.users == {"a", "b"}

    def test_disjoint_sets_warn(self):
        result = anchor_overlap([{"a"}, {"b"}])
        assert result.users == frozenset()
        assert result.empty_warning

    def test_subset_of_every_input(self):
        sets = [{"a", "b", "c"}, {"b", "c"}, {"c", "b", "x"}]
        result = anchor_overlap(sets)
        for s in sets:
            assert result.users <= s

    def test_needs_two_sets(self):
        with pytest.raises(ValueError):
            anchor_overlap([{"a"}])


class TestSummarize:
    def test_counts_sum_over_subreddits(self):
        snaps = [
            make_snapshot([("a", "b", 1)], subreddit="x", label="loyal", window=1),
            make_snapshot([("a", "b", 1), ("b", "c", 1)], subreddit="y",
                          label="loyal", window=1),
            make_snapshot([("p", "q", 1)], subreddit="z", label="vagrant", window=1),
        ]
        summary = summarize(snaps)
        loyal = summary.rows[("loyal", 1)]
        assert loyal.subreddit_count == 2
        assert loyal.node_count == 2 + 3
        assert loyal.edge_count == 1 + 2
        assert summary.rows[("vagrant", 1)].node_count == 2

    def test_empty_collection(self):
        assert summarize([]).rows == {}

    def test_csv_shape(self):
        snaps = [make_snapshot([("a", "b", 1)], label="loyal", window=1)]
        csv_text = summarize(snaps).to_csv()
        lines = csv_text.strip().splitlines()
        assert lines[0] == "class,window,subreddits,nodes,edges"
        assert lines[1] == "loyal,1,1,2,1"


@settings(max_examples=50)
@given(st.lists(st.tuples(st.sampled_from("abcdef"), st.sampled_from("abcdef"),
                          st.integers(min_value=1, max_value=9)),
                min_size=1, max_size=20))
def test_parse_serialize_roundtrip_property(raw_edges):
    lines = [f"{s},{t},{w}" for s, t, w in raw_edges]
    snap = parse_edge_list(lines, "s", 1)
    again = parse_edge_list(snapshot_to_edge_lines(snap), "s", 1)
    assert again.graph.nodes == snap.graph.nodes
    assert again.graph.edges == snap.graph.edges
