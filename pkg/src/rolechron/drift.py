"""Role drift: per-user cosine drift, elbow-KMeans community drift, silhouettes."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np

from .embedding import EmbeddingSpace
from .rng import derived_rng

logger = logging.getLogger(__name__)

KMEANS_TOL = 1e-6
KMEANS_MAX_ITER = 300
KMEANS_RESTARTS = 10
DEFAULT_K_RANGE = range(2, 11)


@dataclass(frozen=True)
class UserDrift:
    user: str
    window_pair: tuple
    drift: float  # 1 - cosine similarity, in [0, 2]


@dataclass(frozen=True)
class SubredditDrift:
    subreddit: str
    window_pair: tuple
    mean: float
    std: float
    n_users: int


@dataclass
class RoleClustering:
    points: np.ndarray
    k: int
    labels: np.ndarray
    centroids: np.ndarray
    inertia: float
    inertia_curve: dict = field(default_factory=dict)  # candidate k -> inertia
    silhouette: float | None = None
    seed: int = 0


@dataclass
class CentroidDrift:
    window_pair: tuple
    pairs: list  # (source centroid idx, target centroid idx, distance)
    mean_distance: float


def user_drift(space_t: EmbeddingSpace, aligned_next: EmbeddingSpace,
               shared, window_pair=("t", "t+1")) -> list:
    """Cosine distance of each shared user's vectors across the two spaces.

    Users with a zero vector in either space are skipped with a warning.
    """
    drifts = []
    for u in sorted(shared):
        a, b = space_t.vector(u), aligned_next.vector(u)
        na, nb = np.linalg.norm(a), np.linalg.norm(b)
        if na == 0 or nb == 0:
            logger.warning("zero vector for user %s; skipped from drift", u)
            continue
        drifts.append(UserDrift(user=u, window_pair=tuple(window_pair),
                                drift=float(1.0 - np.dot(a, b) / (na * nb))))
    return drifts


def subreddit_drift(drifts_by_subreddit: dict) -> list:
    """Arithmetic mean and population std of user drifts per subreddit."""
    results = []
    for subreddit in sorted(drifts_by_subreddit):
        drifts = drifts_by_subreddit[subreddit]
        if not drifts:
            logger.warning("subreddit %s has no drifts; excluded", subreddit)
            continue
        values = np.array([d.drift for d in drifts])
        results.append(SubredditDrift(
            subreddit=subreddit, window_pair=drifts[0].window_pair,
            mean=float(values.mean()), std=float(values.std()),
            n_users=len(values)))
    return results


def _kmeans_pp_init(points: np.ndarray, k: int, rng) -> np.ndarray:
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]))
    centroids[0] = points[rng.integers(n)]
    d2 = ((points - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total == 0:
            centroids[j] = points[rng.integers(n)]
        else:
            centroids[j] = points[np.searchsorted(np.cumsum(d2 / total),
                                                  rng.random())]
        d2 = np.minimum(d2, ((points - centroids[j]) ** 2).sum(axis=1))
    return centroids


def _lloyd(points: np.ndarray, centroids: np.ndarray) -> tuple:
    k = centroids.shape[0]
    for _ in range(KMEANS_MAX_ITER):
        d2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        labels = d2.argmin(axis=1)
        new_centroids = centroids.copy()
        for j in range(k):
            mask = labels == j
            if mask.any():
                new_centroids[j] = points[mask].mean(axis=0)
            else:
                # empty cluster: claim the point farthest from its centroid
                far = d2[np.arange(len(points)), labels].argmax()
                new_centroids[j] = points[far]
                labels[far] = j
        shift = np.linalg.norm(new_centroids - centroids, axis=1).max()
        centroids = new_centroids
        if shift < KMEANS_TOL:
            break
    d2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    labels = d2.argmin(axis=1)
    inertia = float(d2[np.arange(len(points)), labels].sum())
    # final centroids recomputed so the centroid-is-cluster-mean invariant holds
    for j in range(k):
        mask = labels == j
        if mask.any():
            centroids[j] = points[mask].mean(axis=0)
    return labels, centroids, inertia


def _exact_kmeans(points: np.ndarray, k: int) -> tuple:
    """Global optimum by enumerating partitions into k non-empty clusters.

    Assignments are generated in restricted-growth form so each partition is
    visited once; only feasible for a handful of points.
    """
    n = points.shape[0]
    best = [None, None, np.inf]

    def recurse(i, labels, used):
        if n - i < k - used:
            return
        if i == n:
            if used != k:
                return
            inertia = 0.0
            arr = np.array(labels)
            cents = np.empty((k, points.shape[1]))
            for j in range(k):
                members = points[arr == j]
                cents[j] = members.mean(axis=0)
                inertia += ((members - cents[j]) ** 2).sum()
            if inertia < best[2]:
                best[0], best[1], best[2] = arr, cents, inertia
            return
        for j in range(min(used + 1, k)):
            labels.append(j)
            recurse(i + 1, labels, max(used, j + 1))
            labels.pop()

    recurse(0, [], 0)
    return best[0], best[1], float(best[2])


EXACT_KMEANS_MAX_POINTS = 10


def kmeans(points, k: int, seed: int = 0,
           n_init: int = KMEANS_RESTARTS) -> RoleClustering:
    """Euclidean KMeans: seeded k-means++ restarts, Lloyd to convergence,
    best of n_init by inertia. Tiny inputs are solved exactly by partition
    enumeration, since restarts can miss the optimum there."""
    points = np.asarray(points, dtype=float)
    if k > points.shape[0]:
        raise ValueError(f"k={k} exceeds point count {points.shape[0]}")
    if k < 1:
        raise ValueError("k must be >= 1")
    if points.shape[0] <= EXACT_KMEANS_MAX_POINTS:
        labels, centroids, inertia = _exact_kmeans(points, k)
        return RoleClustering(points=points, k=k, labels=labels,
                              centroids=centroids, inertia=inertia, seed=seed)
    best = None
    for restart in range(n_init):
        rng = derived_rng(seed, "kmeans", restart)
        init = _kmeans_pp_init(points, k, rng)
        labels, centroids, inertia = _lloyd(points, init)
        if best is None or inertia < best[2]:
            best = (labels, centroids, inertia)
    labels, centroids, inertia = best
    return RoleClustering(points=points, k=k, labels=labels,
                          centroids=centroids, inertia=inertia, seed=seed)


def elbow_k(points, k_range=DEFAULT_K_RANGE, seed: int = 0) -> tuple[int, dict]:
    """Cluster count with maximal inertia-curve curvature (discrete second
    difference); ties prefer the smaller k. Returns (k*, inertia curve).

    A flat curve (no positive curvature) falls back to min(k_range) with a
    warning.
    """
    points = np.asarray(points, dtype=float)
    ks = sorted(k_range)
    if points.shape[0] <= max(ks):
        raise ValueError("need more points than max(k_range)")
    # extend one step below so curvature is defined at min(k_range)
    eval_ks = ([ks[0] - 1] if ks[0] > 1 else []) + ks
    inertias = {k: kmeans(points, k, seed=seed).inertia for k in eval_ks}
    best_k, best_curv = None, 0.0
    for k in ks:
        if k - 1 not in inertias or k + 1 not in inertias:
            continue
        curv = inertias[k - 1] - 2 * inertias[k] + inertias[k + 1]
        if curv > best_curv:
            best_k, best_curv = k, curv
    if best_k is None:
        logger.warning("flat inertia curve; falling back to k=%d", ks[0])
        best_k = ks[0]
    return best_k, {k: inertias[k] for k in ks}


def silhouette(points, labels) -> float:
    """Mean silhouette score; singleton clusters contribute 0, as do points
    with degenerate a = b = 0."""
    points = np.asarray(points, dtype=float)
    labels = np.asarray(labels)
    clusters = np.unique(labels)
    if clusters.size < 2:
        raise ValueError("silhouette needs at least 2 clusters")
    diff = points[:, None, :] - points[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    scores = np.zeros(points.shape[0])
    for i in range(points.shape[0]):
        own = labels == labels[i]
        if own.sum() == 1:
            continue  # singleton convention: 0
        a = dist[i, own].sum() / (own.sum() - 1)
        b = min(dist[i, labels == c].mean() for c in clusters if c != labels[i])
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0 else (b - a) / denom
    return float(scores.mean())


def centroid_drift(clustering_a: RoleClustering, clustering_b: RoleClustering,
                   window_pair=("t", "t+1")) -> CentroidDrift:
    """1-NN match of each source centroid to its closest target centroid.

    Collisions (two source centroids sharing a target) are allowed.
    """
    if clustering_a.k != clustering_b.k:
        raise ValueError(
            f"cluster count mismatch ({clustering_a.k} vs {clustering_b.k}); "
            "recluster both spaces at the shared k*")
    pairs = []
    for i, c in enumerate(clustering_a.centroids):
        d = np.linalg.norm(clustering_b.centroids - c, axis=1)
        j = int(d.argmin())
        pairs.append((i, j, float(d[j])))
    mean_dist = float(np.mean([p[2] for p in pairs]))
    return CentroidDrift(window_pair=tuple(window_pair), pairs=pairs,
                         mean_distance=mean_dist)


@dataclass
class DriftReportRow:
    subreddit: str
    class_label: str
    window_pair: str
    n_users: int
    mean_cos_dist: float
    std_cos_dist: float
    k_star: int | None
    mean_centroid_dist: float | None
    silhouette_t: float | None
    silhouette_t_next: float | None


@dataclass
class DriftReport:
    rows: list = field(default_factory=list)

    HEADER = ["subreddit", "class", "window_pair", "n_users", "mean_cos_dist",
              "std_cos_dist", "k_star", "mean_centroid_dist",
              "silhouette_t", "silhouette_t_next"]

    def class_aggregates(self) -> list:
        """Per (class, window_pair) mean rows over member subreddits."""
        groups: dict = {}
        for row in self.rows:
            groups.setdefault((row.class_label, row.window_pair), []).append(row)
        agg = []
        for (label, pair) in sorted(groups):
            members = groups[(label, pair)]
            drifts = [r.mean_cos_dist for r in members]
            cents = [r.mean_centroid_dist for r in members
                     if r.mean_centroid_dist is not None]
            agg.append((label, pair, len(members),
                        float(np.mean(drifts)),
                        float(np.mean(cents)) if cents else None))
        return agg

    def to_csv(self) -> str:
        def fmt(x):
            return "" if x is None else (f"{x:.10g}" if isinstance(x, float) else x)

        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(self.HEADER)
        for row in sorted(self.rows, key=lambda r: (r.subreddit, r.window_pair)):
            writer.writerow([row.subreddit, row.class_label, row.window_pair,
                             row.n_users, fmt(row.mean_cos_dist),
                             fmt(row.std_cos_dist), fmt(row.k_star),
                             fmt(row.mean_centroid_dist),
                             fmt(row.silhouette_t), fmt(row.silhouette_t_next)])
        for (label, pair, n, mean_drift, mean_cent) in self.class_aggregates():
            writer.writerow([f"class:{label}", label, pair, n, fmt(mean_drift),
                             "", "", fmt(mean_cent), "", ""])
        return buf.getvalue()
