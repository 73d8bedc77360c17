import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rolechron.align import (AmalgamatedSpace, amalgamate, evaluate_alignment,
                             pca_project, procrustes_align, sign_align)
from rolechron.embedding import EmbeddingSpace
from rolechron.synth import make_rotated_pair, random_orthogonal


def space_from(matrix, tag="s"):
    matrix = np.asarray(matrix, dtype=float)
    users = [f"u{i}" for i in range(matrix.shape[0])]
    return EmbeddingSpace(users=users, matrix=matrix,
                          provenance={"snapshot": tag})


class TestProcrustesAlign:
    def test_identity_case(self):
        src = space_from([[1.0, 2.0], [3.0, 0.5], [-1.0, 4.0]])
        result = procrustes_align(src, src, src.users)
        assert np.allclose(result.rotation, np.eye(2), atol=1e-10)
        assert result.anchor_residual == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(result.aligned_source.matrix, src.matrix, atol=1e-10)

    def test_2d_toy_recovers_clockwise_rotation(self):
        # target anchors (1,0),(0,1); source is the target rotated 90deg
        # counter-clockwise, so the recovered Q is the clockwise rotation
        target = space_from([[1.0, 0.0], [0.0, 1.0]])
        ccw = np.array([[0.0, 1.0], [-1.0, 0.0]])
        source = space_from(target.matrix @ ccw)
        result = procrustes_align(source, target, target.users)
        clockwise = np.array([[0.0, -1.0], [1.0, 0.0]])
        assert np.allclose(result.rotation, clockwise, atol=1e-10)
        assert result.anchor_residual < 1e-10

    def test_recovers_planted_rotation(self):
        pair = make_rotated_pair(40, 8, noise=0.0, seed=3)
        result = procrustes_align(pair.transformed, pair.base,
                                  pair.base.users[:12])
        assert np.linalg.norm(result.rotation - pair.rotation.T) < 1e-6

    def test_rotation_is_orthogonal(self):
        rng = np.random.default_rng(0)
        src = space_from(rng.standard_normal((6, 4)))
        tgt = space_from(rng.standard_normal((6, 4)))
        q = procrustes_align(src, tgt, src.users[:4]).rotation
        assert np.abs(q.T @ q - np.eye(4)).max() < 1e-8
        assert abs(abs(np.linalg.det(q)) - 1.0) < 1e-8

    def test_too_few_anchors(self):
        src = space_from(np.eye(3))
        with pytest.raises(ValueError):
            procrustes_align(src, src, ["u0"])

    def test_missing_anchor_listed(self):
        src = space_from(np.eye(3))
        with pytest.raises(ValueError, match="ghost"):
            procrustes_align(src, src, ["u0", "ghost"])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            procrustes_align(space_from(np.eye(3)),
                             space_from(np.ones((3, 4))), ["u0", "u1"])

    def test_monte_carlo_optimality(self):
        # returned residual beats 10000 random orthogonal matrices on the
        # normalized anchor blocks
        rng = np.random.default_rng(7)
        src = space_from(rng.standard_normal((4, 3)))
        tgt = space_from(rng.standard_normal((4, 3)))
        anchors = src.users
        result = procrustes_align(src, tgt, anchors)
        a = src.matrix - src.matrix.mean(axis=0)
        b = tgt.matrix - tgt.matrix.mean(axis=0)
        a /= np.linalg.norm(a)
        b /= np.linalg.norm(b)
        for _ in range(10000):
            q = random_orthogonal(3, rng)
            assert result.anchor_residual <= np.linalg.norm(a @ q - b) + 1e-9

    def test_invariant_under_source_pre_rotation(self):
        # rotating the source first changes Q but not the aligned anchor rows
        rng = np.random.default_rng(2)
        src = space_from(rng.standard_normal((10, 5)))
        tgt = space_from(rng.standard_normal((10, 5)))
        anchors = src.users[:6]
        plain = procrustes_align(src, tgt, anchors)
        pre = random_orthogonal(5, rng)
        twisted = space_from(src.matrix @ pre)
        again = procrustes_align(twisted, tgt, anchors)
        idx = [src.users.index(u) for u in sorted(anchors)]
        assert np.allclose(plain.aligned_source.matrix[idx],
                           again.aligned_source.matrix[idx], atol=1e-6)

    def test_center_toggle_off_is_pure_rotation(self):
        pair = make_rotated_pair(10, 4, noise=0.0, seed=1)
        result = procrustes_align(pair.transformed, pair.base, pair.base.users,
                                  center=False, scale=False)
        assert np.allclose(result.aligned_source.matrix,
                           pair.transformed.matrix @ result.rotation)


class TestEvaluateAlignment:
    def test_identical_spaces(self):
        s = space_from([[1.0, 2.0], [0.5, -1.0]])
        ev = evaluate_alignment(s, s, s, s.users)
        assert ev.baseline_mean == pytest.approx(1.0)
        assert ev.aligned_mean == pytest.approx(1.0)
        assert ev.aligned_std == pytest.approx(0.0)

    def test_negated_space(self):
        s = space_from([[1.0, 2.0], [0.5, -1.0]])
        neg = space_from(-s.matrix)
        ev = evaluate_alignment(s, neg, neg, s.users)
        assert ev.baseline_mean == pytest.approx(-1.0)

    def test_alignment_never_hurts_rotated_pair(self):
        for seed in range(5):
            pair = make_rotated_pair(30, 6, noise=0.05, seed=seed)
            res = procrustes_align(pair.transformed, pair.base,
                                   pair.base.users[:10])
            ev = evaluate_alignment(pair.base, pair.transformed,
                                    res.aligned_source, pair.base.users)
            assert ev.aligned_mean >= ev.baseline_mean
            assert ev.n_users == 30

    def test_no_shared_users_rejected(self):
        s = space_from(np.eye(3))
        with pytest.raises(ValueError):
            evaluate_alignment(s, s, s, [])


class TestAmalgamate:
    def test_tagged_union_keeps_duplicates(self):
        rng = np.random.default_rng(0)
        tgt = space_from(rng.standard_normal((10, 4)))
        src = space_from(rng.standard_normal((12, 4)))
        am = amalgamate(tgt, src, "T1", "T2")
        assert am.matrix.shape == (22, 4)
        assert am.tags[0] == ("u0", "T1")
        assert am.tags[10] == ("u0", "T2")

    def test_empty_source_copies_target(self):
        tgt = space_from(np.eye(3))
        empty = EmbeddingSpace(users=[], matrix=np.zeros((0, 3)))
        am = amalgamate(tgt, empty, "T1", "T2")
        assert am.matrix.shape == (3, 3)
        assert len(am.tags) == 3

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            amalgamate(space_from(np.eye(3)), space_from(np.ones((2, 4))),
                       "T1", "T2")


def tagged(matrix, tag="T1"):
    matrix = np.asarray(matrix, dtype=float)
    return AmalgamatedSpace(tags=[(f"u{i}", tag) for i in range(len(matrix))],
                            matrix=matrix)


class TestPcaProject:
    def test_collinear_rows_have_zero_second_variance(self):
        direction = np.array([1.0, 2.0, -1.0])
        rows = np.outer([0.0, 1.0, 2.0, 3.5], direction)
        proj = pca_project(tagged(rows))
        assert proj.explained_variance_ratio[1] == pytest.approx(0.0, abs=1e-12)

    def test_axis_aligned_data_keeps_dominant_axis(self):
        rng = np.random.default_rng(1)
        rows = np.column_stack([rng.standard_normal(50) * 10,
                                rng.standard_normal(50)])
        proj = pca_project(tagged(rows))
        assert abs(proj.components[0, 0]) > 0.99

    def test_matches_eigendecomposition_oracle(self):
        rng = np.random.default_rng(5)
        rows = rng.standard_normal((5, 7))
        proj = pca_project(tagged(rows))
        centered = rows - rows.mean(axis=0)
        evals, evecs = np.linalg.eigh(centered.T @ centered)
        order = np.argsort(evals)[::-1][:2]
        for j, col in enumerate(order):
            v = evecs[:, col]
            if v[np.argmax(np.abs(v))] < 0:
                v = -v
            assert np.allclose(proj.components[j], v, atol=1e-8)
            assert np.allclose(proj.coordinates[:, j], centered @ v, atol=1e-8)

    def test_sign_convention_deterministic(self):
        rng = np.random.default_rng(9)
        rows = rng.standard_normal((8, 4))
        proj = pca_project(tagged(rows))
        for comp in proj.components:
            assert comp[np.argmax(np.abs(comp))] > 0

    def test_too_few_rows(self):
        with pytest.raises(ValueError):
            pca_project(tagged(np.eye(2)))

    def test_zero_variance_rejected(self):
        with pytest.raises(ValueError, match="variance"):
            pca_project(tagged(np.ones((4, 3))))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000),
           st.floats(min_value=-100, max_value=100, allow_nan=False))
    def test_translation_invariance(self, seed, shift):
        rng = np.random.default_rng(seed)
        rows = rng.standard_normal((6, 3))
        base = pca_project(tagged(rows))
        moved = pca_project(tagged(rows + shift))
        assert np.abs(base.coordinates - moved.coordinates).max() < 1e-8


class TestSignAlign:
    def project_pair(self, flip_pc=None):
        rng = np.random.default_rng(4)
        rows = rng.standard_normal((12, 6))
        a = pca_project(tagged(rows, "T1"))
        b = pca_project(tagged(rows, "T1"))
        if flip_pc is not None:
            b.coordinates[:, flip_pc] = -b.coordinates[:, flip_pc]
            b.components[flip_pc] = -b.components[flip_pc]
        return a, b

    def test_negative_correlation_forces_flip(self):
        a, b = self.project_pair(flip_pc=0)
        fixed = sign_align(a, b, a.tags)
        assert np.allclose(fixed.coordinates[:, 0], a.coordinates[:, 0])

    def test_identical_projection_untouched(self):
        a, b = self.project_pair()
        fixed = sign_align(a, b, a.tags)
        assert np.allclose(fixed.coordinates, b.coordinates)
        assert np.allclose(fixed.components, b.components)

    def test_componentwise_rule(self):
        a, b = self.project_pair(flip_pc=1)
        fixed = sign_align(a, b, a.tags)
        assert np.allclose(fixed.coordinates[:, 0], a.coordinates[:, 0])
        assert np.allclose(fixed.coordinates[:, 1], a.coordinates[:, 1])

    def test_idempotent(self):
        a, b = self.project_pair(flip_pc=0)
        once = sign_align(a, b, a.tags)
        twice = sign_align(a, once, a.tags)
        assert np.allclose(once.coordinates, twice.coordinates)

    def test_zero_dot_product_warns_not_flips(self):
        a, b = self.project_pair()
        b.coordinates[:, 1] = 0.0
        a.coordinates[:, 1] = 1.0
        fixed = sign_align(a, b, a.tags)
        assert any("component 2" in w for w in fixed.flip_warnings)

    def test_no_shared_tags_rejected(self):
        a, b = self.project_pair()
        with pytest.raises(ValueError):
            sign_align(a, b, [])
