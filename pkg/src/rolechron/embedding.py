"""Embedding spaces and the end-to-end structural role embedding of a snapshot."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from .context_graph import build_context_graph
from .distances import structural_distances
from .graph_core import TemporalSnapshot
from .profiles import degree_profiles
from .rng import derive_seed
from .skipgram import train_skipgram
from .walks import generate_walks


@dataclass
class EmbedParams:
    """Hyperparameters of the role-embedding stage; d comes from the method's
    usual 128-dimensional setting, the rest are configurable defaults."""

    dim: int = 128
    k_max: int = 5
    walks_per_node: int = 10
    walk_length: int = 80
    stay_prob: float = 0.7
    window: int = 10
    negatives: int = 5
    epochs: int = 5
    alpha: float = 0.025
    min_alpha: float = 1e-4
    sparsify: bool = False
    seed: int = 1


@dataclass
class EmbeddingSpace:
    """Row-per-node vector space with provenance for reproducibility."""

    users: list
    matrix: np.ndarray
    provenance: dict = field(default_factory=dict)
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != len(self.users):
            raise ValueError("matrix must have one row per user")
        if not np.isfinite(self.matrix).all():
            raise ValueError("embedding matrix contains NaN or Inf")
        self._index = {u: i for i, u in enumerate(self.users)}
        if len(self._index) != len(self.users):
            raise ValueError("duplicate user ids")

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __contains__(self, user) -> bool:
        return user in self._index

    def vector(self, user) -> np.ndarray:
        return self.matrix[self._index[user]]

    def shared_users(self, other: "EmbeddingSpace") -> list:
        return sorted(set(self._index) & set(other._index))

    def with_matrix(self, matrix: np.ndarray, **extra_provenance) -> "EmbeddingSpace":
        return EmbeddingSpace(users=list(self.users), matrix=matrix,
                              provenance={**self.provenance, **extra_provenance})

    # --- persistence -------------------------------------------------------

    def save_text(self, path):
        seed = self.provenance.get("seed", 0)
        with open(path, "w") as fh:
            fh.write(f"{len(self.users)} {self.dim} {seed}\n")
            for user, row in zip(self.users, self.matrix):
                fh.write(user + " " + " ".join(repr(float(x)) for x in row) + "\n")

    @staticmethod
    def load_text(path) -> "EmbeddingSpace":
        with open(path) as fh:
            n, d, seed = fh.readline().split()
            n, d = int(n), int(d)
            users, rows = [], []
            for _ in range(n):
                parts = fh.readline().split()
                users.append(parts[0])
                rows.append([float(x) for x in parts[1:]])
        matrix = np.array(rows, dtype=float).reshape(n, d)
        return EmbeddingSpace(users=users, matrix=matrix,
                              provenance={"seed": int(seed)})

    def save_binary(self, path):
        """Index table (utf-8 header plus user ids), then little-endian float32 rows."""
        with open(path, "wb") as fh:
            seed = self.provenance.get("seed", 0)
            header = f"{len(self.users)} {self.dim} {seed}\n"
            fh.write(header.encode())
            for user in self.users:
                fh.write(user.encode() + b"\n")
            fh.write(self.matrix.astype("<f4").tobytes())

    @staticmethod
    def load_binary(path) -> "EmbeddingSpace":
        with open(path, "rb") as fh:
            n, d, seed = fh.readline().split()
            n, d = int(n), int(d)
            users = [fh.readline().rstrip(b"\n").decode() for _ in range(n)]
            data = fh.read(n * d * 4)
        matrix = np.frombuffer(data, dtype="<f4").reshape(n, d).astype(float)
        return EmbeddingSpace(users=users, matrix=matrix,
                              provenance={"seed": int(seed)})


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("cosine undefined for zero vector")
    return float(np.dot(a, b) / (na * nb))


def embed(snapshot: TemporalSnapshot, params: EmbedParams | None = None,
          node_order=None) -> EmbeddingSpace:
    """Profiles -> structural distances -> context graph -> walks -> SGNS.

    `node_order` (optional) pins RNG consumption to a canonical node ordering,
    so relabeled graphs embed to row-permuted but otherwise identical spaces.
    """
    if params is None:
        params = EmbedParams()
    graph = snapshot.graph
    if graph.node_count == 0:
        raise ValueError("cannot embed an empty graph")
    profiles = degree_profiles(graph, params.k_max)
    table = structural_distances(profiles, sparsify=params.sparsify)
    ctx = build_context_graph(table, nodes=graph.nodes, node_order=node_order)
    corpus = generate_walks(ctx, params.walks_per_node, params.walk_length,
                            params.stay_prob,
                            seed=derive_seed(params.seed, "walks"))
    users, matrix = train_skipgram(
        corpus, dim=params.dim, window=params.window,
        negatives=params.negatives, epochs=params.epochs,
        alpha=params.alpha, min_alpha=params.min_alpha,
        seed=derive_seed(params.seed, "train"), node_order=node_order)
    provenance = {
        "seed": params.seed,
        "snapshot": f"{snapshot.subreddit}/T{snapshot.window_index}",
        "params": asdict(params),
    }
    return EmbeddingSpace(users=users, matrix=matrix, provenance=provenance)
