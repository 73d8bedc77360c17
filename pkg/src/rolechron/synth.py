"""Synthetic graphs and spaces with planted ground truth for validation."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embedding import EmbeddingSpace
from .graph_core import InteractionGraph, TemporalSnapshot
from .rng import derived_rng


@dataclass
class PlantedRoleGraph:
    graph: InteractionGraph
    role_of: dict  # node -> role label
    automorphic_pairs: list  # (node in copy i, corresponding node in copy j)


@dataclass
class SyntheticSpacePair:
    base: EmbeddingSpace
    transformed: EmbeddingSpace
    rotation: np.ndarray  # the planted orthogonal Q*
    noise: float


def _component_edges(kind: str, n: int, prefix: str) -> tuple[list, dict]:
    """Edges and role labels for one named primitive; nodes prefix_0..prefix_{n-1}.

    Every structural link is emitted in both directions with weight 1.
    """
    name = lambda i: f"{prefix}{i:03d}"
    edges = []
    roles = {}

    def link(i, j):
        edges.append((name(i), name(j), 1.0))
        edges.append((name(j), name(i), 1.0))

    if kind == "cycle":
        if n < 3:
            raise ValueError("cycle needs n >= 3")
        for i in range(n):
            link(i, (i + 1) % n)
        roles = {name(i): "cycle" for i in range(n)}
    elif kind == "star":
        if n < 2:
            raise ValueError("star needs n >= 2 (one center plus leaves)")
        for i in range(1, n):
            link(0, i)
        roles = {name(0): "hub", **{name(i): "leaf" for i in range(1, n)}}
    elif kind == "path":
        if n < 2:
            raise ValueError("path needs n >= 2")
        for i in range(n - 1):
            link(i, i + 1)
        roles = {name(i): ("path-end" if i in (0, n - 1) else "path-mid")
                 for i in range(n)}
    elif kind == "clique":
        if n < 2:
            raise ValueError("clique needs n >= 2")
        for i in range(n):
            for j in range(i + 1, n):
                link(i, j)
        roles = {name(i): "clique" for i in range(n)}
    else:
        raise ValueError(f"unknown component kind {kind!r}")
    return edges, roles


def parse_component_spec(spec: str, prefix: str = "n") -> tuple[list, dict]:
    """Mini-language: `kind:n` primitives chained with `+` into one connected
    component (consecutive primitives joined by a bridge edge pair).

    Example: "star:8+cycle:12" is a 20-node hub-and-ring component.
    """
    spec = spec.strip()
    if not spec:
        raise ValueError("empty component spec")
    edges: list = []
    roles: dict = {}
    prev_anchor = None
    for idx, part in enumerate(spec.split("+")):
        kind, _, n_raw = part.strip().partition(":")
        try:
            n = int(n_raw)
        except ValueError:
            raise ValueError(f"bad component size in {part!r}")
        part_prefix = f"{prefix}{idx}_"
        part_edges, part_roles = _component_edges(kind.strip(), n, part_prefix)
        edges += part_edges
        roles.update(part_roles)
        anchor = f"{part_prefix}000"
        if prev_anchor is not None:
            edges.append((prev_anchor, anchor, 1.0))
            edges.append((anchor, prev_anchor, 1.0))
            roles[prev_anchor] = roles[prev_anchor] + "+bridge"
            roles[anchor] = roles[anchor] + "+bridge"
        prev_anchor = anchor
    return edges, roles


def make_mirrored_graph(component_spec: str, copies: int = 2,
                        seed: int = 0) -> PlantedRoleGraph:
    """Disjoint relabeled copies of one component; corresponding nodes across
    copies are automorphic, hence structurally equivalent by construction."""
    if copies < 1:
        raise ValueError("copies must be >= 1")
    all_edges: list = []
    role_of: dict = {}
    copy_nodes: list[list] = []
    for c in range(copies):
        prefix = f"c{c}_"
        edges, roles = parse_component_spec(component_spec, prefix=prefix)
        all_edges += edges
        role_of.update(roles)
        copy_nodes.append(sorted({n for e in edges for n in e[:2]}))
    pairs = []
    for i in range(copies):
        for j in range(i + 1, copies):
            pairs += list(zip(copy_nodes[i], copy_nodes[j]))
    graph = InteractionGraph.from_edges(all_edges)
    return PlantedRoleGraph(graph=graph, role_of=role_of,
                            automorphic_pairs=pairs)


def planted_snapshot(planted: PlantedRoleGraph, subreddit: str = "synthetic",
                     window_index: int = 1, months=("m1",)) -> TemporalSnapshot:
    return TemporalSnapshot(subreddit=subreddit, class_label="unlabeled",
                            window_index=window_index,
                            months_covered=tuple(months), graph=planted.graph)


def random_orthogonal(d: int, rng: np.random.Generator) -> np.ndarray:
    """QR of a Gaussian matrix with the diagonal signs fixed positive."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def make_rotated_pair(n: int, d: int, noise: float = 0.0,
                      seed: int = 0) -> SyntheticSpacePair:
    """Gaussian base rows and their image under a seeded random rotation,
    optionally perturbed per-row after rotating."""
    if n < d:
        raise ValueError("need n >= d rows")
    if d < 2:
        raise ValueError("need d >= 2")
    rng = derived_rng(seed, "rotated-pair")
    base_matrix = rng.standard_normal((n, d))
    rotation = random_orthogonal(d, rng)
    transformed_matrix = base_matrix @ rotation
    if noise > 0:
        transformed_matrix = transformed_matrix + noise * rng.standard_normal((n, d))
    users = [f"u{i:05d}" for i in range(n)]
    base = EmbeddingSpace(users=users, matrix=base_matrix,
                          provenance={"seed": seed, "snapshot": "synthetic/base"})
    transformed = EmbeddingSpace(users=list(users), matrix=transformed_matrix,
                                 provenance={"seed": seed,
                                             "snapshot": "synthetic/rotated"})
    return SyntheticSpacePair(base=base, transformed=transformed,
                              rotation=rotation, noise=noise)


# --- on-disk fixtures -------------------------------------------------------

def write_edge_file(path, graph: InteractionGraph):
    """Serialize in the same format the ingestion stage reads."""
    lines = [f"{s}\t{t}\t{w:g}" for (s, t), w in sorted(graph.edges.items())]
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text("\n".join(lines) + "\n")


def write_pipeline_fixture(root, n_windows: int = 3, seed: int = 0,
                           identical_windows: bool = False,
                           component_spec: str = "star:4+cycle:5",
                           subreddits=(("synthloyal", "loyal"),
                                       ("synthvagrant", "vagrant"))) -> Path:
    """Data root + manifest + config for an end-to-end pipeline run.

    Each window spans three synthetic months; edges are split round-robin
    across month files so windowed merging is exercised. Unless
    identical_windows is set, per-window weight jitter makes windows distinct.
    """
    root = Path(root)
    months_of = {f"T{w + 1}": [f"2014-{3 * w + m + 1:02d}" for m in range(3)]
                 for w in range(n_windows)}

    for sub, _label in subreddits:
        planted = make_mirrored_graph(component_spec, copies=2, seed=seed)
        base_edges = sorted(planted.graph.edges.items())
        for w in range(n_windows):
            label = f"T{w + 1}"
            rng = derived_rng(seed, sub, "jitter", 0 if identical_windows else w)
            month_lines: dict = {m: [] for m in months_of[label]}
            for i, ((s, t), weight) in enumerate(base_edges):
                jitter = 1.0 + rng.integers(0, 3) * 0.5
                month = months_of[label][i % 3]
                month_lines[month].append(f"{s}\t{t}\t{weight * jitter:g}")
            for month, lines in month_lines.items():
                path = root / "data" / sub / f"{month}.edges"
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text("\n".join(lines) + "\n" if lines else "")

    manifest_lines = ["[classes]"]
    manifest_lines += [f"{sub} = {label}" for sub, label in subreddits]
    manifest_lines += ["", "[windows]"]
    manifest_lines += [f"{label} = {','.join(months)}"
                       for label, months in months_of.items()]
    (root / "manifest.txt").write_text("\n".join(manifest_lines) + "\n")

    config_text = (
        "[data]\n"
        "root = data\n"
        "manifest = manifest.txt\n"
        "out = out\n"
        "\n[pipeline]\n"
        f"seed = {seed}\n"
        "k_top = 100\n"
        "k_min = 2\n"
        "k_max_clusters = 6\n"
        "\n[embedding]\n"
        "dim = 48\n"
        "walks_per_node = 12\n"
        "walk_length = 30\n"
        "epochs = 6\n"
        "window = 5\n"
    )
    (root / "config.ini").write_text(config_text)
    return root / "config.ini"
