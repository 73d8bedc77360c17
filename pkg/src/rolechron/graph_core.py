"""Edge-list ingestion, temporal windowing, top-k selection, and dataset summaries."""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

CLASS_LABELS = ("loyal", "vagrant", "unlabeled")


class EdgeListParseError(ValueError):
    """Raised for a malformed edge-list line; carries the 1-based line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class InteractionGraph:
    """Directed weighted graph; at most one edge per ordered pair, weights > 0.

    Treated as immutable after construction: all operations build new graphs.
    """

    nodes: frozenset
    edges: dict  # (source, target) -> weight

    @staticmethod
    def from_edges(edge_iter: Iterable[tuple[str, str, float]],
                   extra_nodes: Iterable[str] = ()) -> "InteractionGraph":
        """Build a graph, merging duplicate ordered pairs by weight summation."""
        merged: dict[tuple[str, str], float] = defaultdict(float)
        nodes = set(extra_nodes)
        for src, dst, w in edge_iter:
            if w <= 0:
                raise ValueError(f"non-positive edge weight {w!r} on ({src}, {dst})")
            merged[(src, dst)] += float(w)
            nodes.add(src)
            nodes.add(dst)
        return InteractionGraph(nodes=frozenset(nodes), edges=dict(merged))

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def has_self_loops(self) -> bool:
        return any(s == t for s, t in self.edges)

    def out_strength(self, node, include_self_loops: bool = False) -> float:
        return sum(w for (s, t), w in self.edges.items()
                   if s == node and (include_self_loops or t != node))

    def in_strength(self, node, include_self_loops: bool = False) -> float:
        return sum(w for (s, t), w in self.edges.items()
                   if t == node and (include_self_loops or s != node))

    def strength(self, node, include_self_loops: bool = False) -> float:
        return (self.in_strength(node, include_self_loops)
                + self.out_strength(node, include_self_loops))

    def degree(self, node, include_self_loops: bool = False) -> int:
        """Unweighted total degree (in-edges plus out-edges)."""
        n = 0
        for (s, t) in self.edges:
            if s == t and not include_self_loops:
                continue
            if s == node:
                n += 1
            if t == node:
                n += 1
        return n

    def undirected_neighbors(self) -> dict:
        """Adjacency of the undirected skeleton, self-loops dropped."""
        adj: dict = {u: set() for u in self.nodes}
        for (s, t) in self.edges:
            if s == t:
                continue
            adj[s].add(t)
            adj[t].add(s)
        return adj


@dataclass(frozen=True)
class TemporalSnapshot:
    """One subreddit in one temporal window."""

    subreddit: str
    class_label: str
    window_index: int
    months_covered: tuple
    graph: InteractionGraph
    empty_warning: bool = False

    def __post_init__(self):
        if self.class_label not in CLASS_LABELS:
            raise ValueError(f"unknown class label {self.class_label!r}")
        if self.window_index < 1:
            raise ValueError("window_index must be >= 1")
        if not self.months_covered:
            raise ValueError("months_covered must be non-empty")


@dataclass(frozen=True)
class TopUsers:
    users: tuple  # ordered by descending score, lexicographic tie-break
    shortfall: bool  # fewer nodes than requested k


@dataclass(frozen=True)
class AnchorSet:
    users: frozenset
    empty_warning: bool

    def __len__(self) -> int:
        return len(self.users)


@dataclass
class SummaryRow:
    subreddit_count: int = 0
    node_count: int = 0
    edge_count: int = 0


@dataclass
class DatasetSummary:
    """Per (class_label, window_index) totals over member subreddits."""

    rows: dict = field(default_factory=dict)  # (class_label, window_index) -> SummaryRow

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["class", "window", "subreddits", "nodes", "edges"])
        for (label, window) in sorted(self.rows):
            row = self.rows[(label, window)]
            writer.writerow([label, window, row.subreddit_count,
                             row.node_count, row.edge_count])
        return buf.getvalue()


def _split_line(line: str) -> list[str]:
    sep = "\t" if "\t" in line else ","
    return [part.strip() for part in line.split(sep)]


def parse_edge_list(lines: Iterable[str], subreddit: str, window_index: int,
                    months: Sequence[str] = ("unknown",),
                    class_label: str = "unlabeled") -> TemporalSnapshot:
    """Parse `source<sep>target[<sep>weight]` lines into a snapshot.

    Delimiter is auto-detected per line (tab preferred, else comma); a missing
    weight defaults to 1. Duplicate ordered pairs merge by weight summation.
    """
    edges = []
    n_lines = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        n_lines += 1
        parts = _split_line(line)
        if len(parts) == 2:
            src, dst = parts
            w = 1.0
        elif len(parts) == 3:
            src, dst, w_raw = parts
            try:
                w = float(w_raw)
            except ValueError:
                raise EdgeListParseError(lineno, f"non-numeric weight {w_raw!r}")
        else:
            raise EdgeListParseError(lineno, f"expected 2 or 3 fields, got {len(parts)}")
        if not src or not dst:
            raise EdgeListParseError(lineno, "empty node identifier")
        if w <= 0:
            raise EdgeListParseError(lineno, f"non-positive weight {w}")
        edges.append((src, dst, w))
    graph = InteractionGraph.from_edges(edges)
    return TemporalSnapshot(subreddit=subreddit, class_label=class_label,
                            window_index=window_index,
                            months_covered=tuple(months),
                            graph=graph, empty_warning=(n_lines == 0))


def snapshot_to_edge_lines(snapshot: TemporalSnapshot) -> list[str]:
    """Serialize in the ingestion format; round-trips to an identical graph."""
    lines = []
    for (s, t) in sorted(snapshot.graph.edges):
        w = snapshot.graph.edges[(s, t)]
        lines.append(f"{s}\t{t}\t{w:g}")
    return lines


def merge_months(snapshots: Sequence[TemporalSnapshot],
                 window_index: int | None = None) -> TemporalSnapshot:
    """Combine per-month snapshots of one subreddit into a window snapshot.

    Node sets union; edge weights sum across months; months_covered is the
    (sorted) union. Month overlap or mixed subreddits are errors.
    """
    if not snapshots:
        raise ValueError("no snapshots to merge")
    subreddits = {s.subreddit for s in snapshots}
    if len(subreddits) != 1:
        raise ValueError(f"cannot merge snapshots of different subreddits: {sorted(subreddits)}")
    seen_months: set[str] = set()
    for s in snapshots:
        overlap = seen_months & set(s.months_covered)
        if overlap:
            raise ValueError(f"month overlap between inputs: {sorted(overlap)}")
        seen_months.update(s.months_covered)
    edges = [(src, dst, w)
             for s in snapshots for (src, dst), w in s.graph.edges.items()]
    extra = set().union(*(s.graph.nodes for s in snapshots))
    first = snapshots[0]
    return TemporalSnapshot(
        subreddit=first.subreddit,
        class_label=first.class_label,
        window_index=window_index if window_index is not None else first.window_index,
        months_covered=tuple(sorted(seen_months)),
        graph=InteractionGraph.from_edges(edges, extra_nodes=extra),
        empty_warning=all(s.empty_warning for s in snapshots),
    )


def top_k_users(snapshot: TemporalSnapshot, k: int,
                score: str = "strength",
                include_self_loops: bool = False) -> TopUsers:
    """The k most active users by node strength (or unweighted degree).

    Ties break lexicographically on user id; if the graph has fewer than k
    nodes, all are returned with the shortfall flag set.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if score not in ("strength", "degree"):
        raise ValueError(f"unknown activity score {score!r}")
    graph = snapshot.graph
    if score == "strength":
        scores = {u: graph.strength(u, include_self_loops) for u in graph.nodes}
    else:
        scores = {u: graph.degree(u, include_self_loops) for u in graph.nodes}
    ranked = sorted(scores, key=lambda u: (-scores[u], u))
    return TopUsers(users=tuple(ranked[:k]), shortfall=len(ranked) < k)


def anchor_overlap(user_sets: Sequence[Iterable]) -> AnchorSet:
    """Intersection of per-window top-k sets; empty intersection is a warning."""
    if len(user_sets) < 2:
        raise ValueError("anchor overlap needs at least two window sets")
    overlap = set(user_sets[0])
    for s in user_sets[1:]:
        overlap &= set(s)
    return AnchorSet(users=frozenset(overlap), empty_warning=not overlap)


def summarize(snapshots: Iterable[TemporalSnapshot]) -> DatasetSummary:
    """Totals per (class label, window): subreddit/node/edge counts."""
    summary = DatasetSummary()
    for s in snapshots:
        key = (s.class_label, s.window_index)
        row = summary.rows.setdefault(key, SummaryRow())
        row.subreddit_count += 1
        row.node_count += s.graph.node_count
        row.edge_count += s.graph.edge_count
    return summary
