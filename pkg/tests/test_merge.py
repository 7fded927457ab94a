import numpy as np
import pytest

from mvov3d.errors import ConfigurationError
from mvov3d.merge import DenseFeatureMap, merge_pixel_features
from mvov3d.refine2d import SparseFeatureMap


def random_sparse(rng, h, w, c, density=0.5):
    out = SparseFeatureMap.empty(h, w, c)
    defined = rng.random((h, w)) < density
    out.features[defined] = rng.standard_normal((int(defined.sum()), c))
    out.count[defined] = 1
    return out


def merge_oracle(base, region, text):
    """Per-pixel sum of defined contributors divided by their count."""
    h, w, c = base.features.shape
    out = np.zeros((h, w, c))
    for i in range(h):
        for j in range(w):
            contribs = [base.features[i, j]]
            for m in (region, text):
                if m is not None and m.count[i, j] > 0:
                    contribs.append(m.features[i, j])
            out[i, j] = np.sum(contribs, axis=0) / len(contribs)
    return out


class TestMergePixelFeatures:
    def test_base_only(self):
        rng = np.random.default_rng(0)
        base = DenseFeatureMap.full(rng.standard_normal((6, 7, 4)))
        empty = SparseFeatureMap.empty(6, 7, 4)
        out = merge_pixel_features(base, empty, empty)
        assert np.array_equal(out.features, base.features)
        assert out.valid.all()

    def test_idempotence_on_equal_inputs(self):
        e = np.array([1.5, -2.0, 0.25])
        base = DenseFeatureMap.full(np.tile(e, (3, 3, 1)))
        sparse = SparseFeatureMap(np.tile(e, (3, 3, 1)), np.ones((3, 3), dtype=np.int64))
        out = merge_pixel_features(base, sparse, sparse)
        assert np.allclose(out.features, np.tile(e, (3, 3, 1)))

    def test_two_term_mean(self):
        b = np.array([2.0, 0.0])
        r = np.array([0.0, 4.0])
        base = DenseFeatureMap.full(np.tile(b, (2, 2, 1)))
        region = SparseFeatureMap(np.tile(r, (2, 2, 1)), np.ones((2, 2), dtype=np.int64))
        out = merge_pixel_features(base, region, None)
        assert np.allclose(out.features, np.tile((b + r) / 2, (2, 2, 1)))

    def test_random_definedness_matches_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            base = DenseFeatureMap.full(rng.standard_normal((16, 16, 8)))
            region = random_sparse(rng, 16, 16, 8)
            text = random_sparse(rng, 16, 16, 8)
            out = merge_pixel_features(base, region, text)
            assert np.allclose(out.features, merge_oracle(base, region, text), atol=1e-6)
            assert out.valid.all()

    def test_symmetry_region_text_swap(self):
        rng = np.random.default_rng(2)
        base = DenseFeatureMap.full(rng.standard_normal((8, 8, 4)))
        region = random_sparse(rng, 8, 8, 4)
        text = random_sparse(rng, 8, 8, 4)
        a = merge_pixel_features(base, region, text)
        b = merge_pixel_features(base, text, region)
        assert np.allclose(a.features, b.features, atol=1e-12)

    def test_convex_hull_bound(self):
        rng = np.random.default_rng(3)
        base = DenseFeatureMap.full(rng.standard_normal((8, 8, 4)))
        region = random_sparse(rng, 8, 8, 4)
        text = random_sparse(rng, 8, 8, 4)
        out = merge_pixel_features(base, region, text)
        for i in range(8):
            for j in range(8):
                contribs = [base.features[i, j]]
                if region.count[i, j]:
                    contribs.append(region.features[i, j])
                if text.count[i, j]:
                    contribs.append(text.features[i, j])
                stack = np.stack(contribs)
                assert np.all(out.features[i, j] >= stack.min(axis=0) - 1e-12)
                assert np.all(out.features[i, j] <= stack.max(axis=0) + 1e-12)

    def test_zero_embedding_not_dropped(self):
        # a legitimate all-zero region embedding must still count in the mean
        base = DenseFeatureMap.full(np.full((2, 2, 2), 2.0))
        zero = SparseFeatureMap(np.zeros((2, 2, 2)), np.ones((2, 2), dtype=np.int64))
        out = merge_pixel_features(base, zero, None)
        assert np.allclose(out.features, 1.0)

    def test_shape_mismatch(self):
        base = DenseFeatureMap.full(np.zeros((4, 4, 2)))
        with pytest.raises(ConfigurationError):
            merge_pixel_features(base, SparseFeatureMap.empty(4, 5, 2), None)

    def test_invalid_base_rejected(self):
        base = DenseFeatureMap(np.zeros((4, 4, 2)), np.zeros((4, 4), dtype=bool))
        with pytest.raises(ConfigurationError):
            merge_pixel_features(base, None, None)
