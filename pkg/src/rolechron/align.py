"""Diachronic alignment: orthogonal Procrustes, amalgamation, PCA, sign fixing."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .embedding import EmbeddingSpace, cosine

ORTHOGONALITY_TOL = 1e-8


@dataclass
class AlignmentResult:
    rotation: np.ndarray  # d x d orthogonal
    anchors: frozenset
    source_id: str
    target_id: str
    aligned_source: EmbeddingSpace
    anchor_residual: float
    rank_deficient: bool = False


@dataclass
class AlignmentEvaluation:
    """Per-user cosine similarity between paired spaces, before and after."""

    baseline_mean: float
    baseline_std: float
    aligned_mean: float
    aligned_std: float
    n_users: int


@dataclass
class AmalgamatedSpace:
    """Union of two spaces' rows, each tagged with (user, window-of-origin)."""

    tags: list  # (user, window_tag) per row
    matrix: np.ndarray

    def __post_init__(self):
        if len(self.tags) != self.matrix.shape[0]:
            raise ValueError("one tag per row required")


@dataclass
class PcaProjection:
    tags: list
    coordinates: np.ndarray  # n x 2
    components: np.ndarray  # 2 x d, orthonormal rows
    explained_variance_ratio: np.ndarray  # length 2
    flip_warnings: list = field(default_factory=list)

    def coords_of(self, tag) -> np.ndarray:
        return self.coordinates[self.tags.index(tag)]


def _anchor_block(space: EmbeddingSpace, anchors: list) -> np.ndarray:
    return np.stack([space.vector(u) for u in anchors])


def procrustes_align(source: EmbeddingSpace, target: EmbeddingSpace,
                     anchors, center: bool = True,
                     scale: bool = True) -> AlignmentResult:
    """Optimal rotation of source onto target, fitted on the anchor users.

    Anchor blocks are mean-centered and scaled to unit Frobenius norm before
    solving (the "normalised" variant; both steps can be toggled off). Output
    rows are anchor-mean centered, rotated, and translated onto the target's
    anchor centroid; they are never scaled.
    """
    anchors = sorted(anchors)
    if len(anchors) < 2:
        raise ValueError("need at least 2 anchors")
    missing = [u for u in anchors if u not in source or u not in target]
    if missing:
        raise ValueError(f"anchors missing from a space: {missing}")
    if source.dim != target.dim:
        raise ValueError("dimension mismatch between spaces")

    a = _anchor_block(source, anchors)
    b = _anchor_block(target, anchors)
    a_mean = a.mean(axis=0)
    b_mean = b.mean(axis=0)
    if center:
        a = a - a_mean
        b = b - b_mean
    if scale:
        na, nb = np.linalg.norm(a), np.linalg.norm(b)
        if na > 0:
            a = a / na
        if nb > 0:
            b = b / nb

    cross = a.T @ b
    u, s, vt = np.linalg.svd(cross)
    rank_deficient = bool((s < 1e-12 * max(s[0], 1e-300)).any()) if s.size else True
    # SVD sign ambiguity in null directions is fixed by numpy's deterministic
    # LAPACK driver; rank deficiency is reported, the minimal-norm Q kept.
    rotation = u @ vt
    residual = float(np.linalg.norm(a @ rotation - b))

    # every source row is centered with the anchor mean, rotated, then moved
    # onto the target's anchor centroid; never scaled
    if center:
        aligned_matrix = (source.matrix - a_mean) @ rotation + b_mean
    else:
        aligned_matrix = source.matrix @ rotation
    aligned = source.with_matrix(aligned_matrix,
                                 aligned_to=target.provenance.get("snapshot", "target"))
    return AlignmentResult(
        rotation=rotation,
        anchors=frozenset(anchors),
        source_id=str(source.provenance.get("snapshot", "source")),
        target_id=str(target.provenance.get("snapshot", "target")),
        aligned_source=aligned,
        anchor_residual=residual,
        rank_deficient=rank_deficient,
    )


def cosine_profile(space_a: EmbeddingSpace, space_b: EmbeddingSpace,
                   shared) -> tuple[float, float]:
    """Mean and population std of per-user cosine similarity."""
    shared = sorted(shared)
    if not shared:
        raise ValueError("no shared users to compare")
    sims = np.array([cosine(space_a.vector(u), space_b.vector(u)) for u in shared])
    return float(sims.mean()), float(sims.std())


def evaluate_alignment(target: EmbeddingSpace, source: EmbeddingSpace,
                       aligned_source: EmbeddingSpace,
                       shared) -> AlignmentEvaluation:
    """Baseline (pre-alignment) vs aligned per-user cosine similarity."""
    shared = sorted(shared)
    base_mean, base_std = cosine_profile(target, source, shared)
    al_mean, al_std = cosine_profile(target, aligned_source, shared)
    return AlignmentEvaluation(baseline_mean=base_mean, baseline_std=base_std,
                               aligned_mean=al_mean, aligned_std=al_std,
                               n_users=len(shared))


def amalgamate(target: EmbeddingSpace, aligned_source: EmbeddingSpace,
               target_tag: str, source_tag: str) -> AmalgamatedSpace:
    """Tagged row union; users in both spaces appear once per window tag."""
    if target.matrix.size and aligned_source.matrix.size \
            and target.dim != aligned_source.dim:
        raise ValueError("dimension mismatch")
    tags = [(u, target_tag) for u in target.users]
    tags += [(u, source_tag) for u in aligned_source.users]
    if aligned_source.matrix.size == 0:
        matrix = target.matrix.copy()
        tags = tags[:len(target.users)]
    else:
        matrix = np.vstack([target.matrix, aligned_source.matrix])
    return AmalgamatedSpace(tags=tags, matrix=matrix)


def pca_project(space: AmalgamatedSpace) -> PcaProjection:
    """Top-2 principal components of the mean-centered rows.

    Deterministic sign convention: each component's largest-magnitude entry
    is made positive, so repeated runs agree before any cross-space sign fix.
    """
    x = space.matrix
    if x.shape[0] < 3:
        raise ValueError("PCA projection needs at least 3 rows")
    centered = x - x.mean(axis=0)
    total_var = float((centered ** 2).sum())
    if total_var == 0:
        raise ValueError("zero variance: all rows identical")
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:2].copy()
    for j in range(components.shape[0]):
        lead = np.argmax(np.abs(components[j]))
        if components[j, lead] < 0:
            components[j] = -components[j]
    if components.shape[0] < 2:
        raise ValueError("rank too low for a 2-D projection")
    coords = centered @ components.T
    evr = (s[:2] ** 2) / (s ** 2).sum()
    return PcaProjection(tags=list(space.tags), coordinates=coords,
                         components=components,
                         explained_variance_ratio=evr)


def sign_align(projection_a: PcaProjection, projection_b: PcaProjection,
               shared_tags) -> PcaProjection:
    """Flip projection_b's components whose shared-row coordinates anticorrelate
    with projection_a's (negative dot product); returns the corrected copy."""
    shared = sorted(shared_tags)
    if not shared:
        raise ValueError("no shared tagged users between projections")
    ia = {t: i for i, t in enumerate(projection_a.tags)}
    ib = {t: i for i, t in enumerate(projection_b.tags)}
    missing = [t for t in shared if t not in ia or t not in ib]
    if missing:
        raise ValueError(f"tags missing from a projection: {missing}")
    coords = projection_b.coordinates.copy()
    components = projection_b.components.copy()
    warnings = list(projection_b.flip_warnings)
    for j in range(2):
        dot = float(sum(projection_a.coordinates[ia[t], j] * projection_b.coordinates[ib[t], j]
                        for t in shared))
        if dot < 0:
            coords[:, j] = -coords[:, j]
            components[j] = -components[j]
        elif dot == 0:
            warnings.append(f"component {j + 1}: zero agreement statistic, not flipped")
    return PcaProjection(tags=list(projection_b.tags), coordinates=coords,
                         components=components,
                         explained_variance_ratio=projection_b.explained_variance_ratio.copy(),
                         flip_warnings=warnings)
