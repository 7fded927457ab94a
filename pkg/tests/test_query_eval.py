import numpy as np
import pytest

from mvov3d.errors import ConfigurationError, DataError
from mvov3d.fusion import PointFeatureField
from mvov3d.query_eval import (
    LabelSet,
    assign_labels,
    compute_confusion,
    compute_metrics,
    evaluate,
)


def orthonormal_labels(n, names=None):
    return LabelSet(names=names or [f"c{i}" for i in range(n)], embeddings=np.eye(n))


class TestAssignLabels:
    def test_exact_embedding_match(self):
        labels = orthonormal_labels(5)
        feats = np.zeros((1, 5))
        feats[0, 3] = 1.0
        field = PointFeatureField(feats, np.ones(1, dtype=np.int64))
        assert assign_labels(field, labels)[0] == 3

    def test_invalid_point_gets_ignore(self):
        labels = orthonormal_labels(3)
        field = PointFeatureField(np.zeros((2, 3)), np.array([1, 0], dtype=np.int64))
        pred = assign_labels(field, labels)
        assert pred[1] == labels.ignore_id

    def test_random_vs_bruteforce_scan(self):
        rng = np.random.default_rng(0)
        labels = LabelSet(
            names=[f"c{i}" for i in range(10)], embeddings=rng.standard_normal((10, 16))
        )
        feats = rng.standard_normal((100, 16))
        field = PointFeatureField(feats, np.ones(100, dtype=np.int64))
        pred = assign_labels(field, labels)
        for i in range(100):
            sims = [
                np.dot(feats[i], labels.embeddings[l])
                / (np.linalg.norm(feats[i]) * np.linalg.norm(labels.embeddings[l]))
                for l in range(10)
            ]
            assert pred[i] == int(np.argmax(sims))

    def test_scale_invariance(self):
        rng = np.random.default_rng(1)
        labels = LabelSet(names=list("abcd"), embeddings=rng.standard_normal((4, 6)))
        feats = rng.standard_normal((50, 6))
        a = assign_labels(PointFeatureField(feats, np.ones(50, dtype=np.int64)), labels)
        b = assign_labels(PointFeatureField(17.0 * feats, np.ones(50, dtype=np.int64)), labels)
        assert np.array_equal(a, b)

    def test_dim_mismatch(self):
        labels = orthonormal_labels(3)
        field = PointFeatureField(np.zeros((2, 4)), np.ones(2, dtype=np.int64))
        with pytest.raises(ConfigurationError):
            assign_labels(field, labels)


class TestLabelSet:
    def test_duplicate_names(self):
        with pytest.raises(DataError):
            LabelSet(names=["a", "a"], embeddings=np.eye(2))

    def test_zero_embedding(self):
        with pytest.raises(DataError):
            LabelSet(names=["a", "b"], embeddings=np.array([[1.0, 0.0], [0.0, 0.0]]))

    def test_bad_bucket(self):
        with pytest.raises(DataError):
            LabelSet(names=["a"], embeddings=np.ones((1, 2)), buckets={"a": "middle"})


class TestComputeConfusion:
    def test_perfect_is_diagonal(self):
        gt = np.array([0, 1, 2, 2, 1])
        confusion, miss = compute_confusion(gt, gt, 3)
        assert np.array_equal(confusion, np.diag([1, 2, 2]))
        assert miss.sum() == 0

    def test_all_ignore_is_zero(self):
        gt = np.full(5, -1)
        pred = np.array([0, 1, 2, 0, 1])
        confusion, miss = compute_confusion(pred, gt, 3)
        assert confusion.sum() == 0 and miss.sum() == 0

    def test_hand_tallied_example(self):
        gt = np.array([0, 0, 0, 1, 1, 1, 2, 2, 2, 2])
        pred = np.array([0, 0, 1, 1, 1, 2, 2, 2, 0, -1])
        confusion, miss = compute_confusion(pred, gt, 3)
        expected = np.array([[2, 1, 0], [0, 2, 1], [1, 0, 2]])
        assert np.array_equal(confusion, expected)
        assert np.array_equal(miss, [0, 0, 1])

    def test_out_of_range(self):
        with pytest.raises(DataError):
            compute_confusion(np.array([5]), np.array([0]), 3)
        with pytest.raises(DataError):
            compute_confusion(np.array([0]), np.array([7]), 3)


class TestComputeMetrics:
    def test_perfect_prediction(self):
        confusion = np.diag([4, 2, 6])
        report = compute_metrics(confusion)
        assert report.miou == 1.0 and report.macc == 1.0

    def test_one_class_half_right(self):
        # gt = [0, 0, 1], pred = [0, 1, 0]: class 0 has TP=1, FN=1, FP=1
        confusion, miss = compute_confusion(np.array([0, 1, 0]), np.array([0, 0, 1]), 2)
        report = compute_metrics(confusion, miss)
        assert report.class_iou[0] == pytest.approx(1 / 3)
        assert report.class_acc[0] == pytest.approx(1 / 2)

    def test_random_vs_set_arithmetic_oracle(self):
        rng = np.random.default_rng(2)
        gt = rng.integers(0, 3, size=200)
        pred = rng.integers(0, 3, size=200)
        confusion, miss = compute_confusion(pred, gt, 3)
        report = compute_metrics(confusion, miss)
        for c in range(3):
            gt_set = set(np.nonzero(gt == c)[0])
            pred_set = set(np.nonzero(pred == c)[0])
            iou = len(gt_set & pred_set) / len(gt_set | pred_set)
            acc = len(gt_set & pred_set) / len(gt_set)
            assert abs(report.class_iou[c] - iou) < 1e-9
            assert abs(report.class_acc[c] - acc) < 1e-9

    def test_iou_le_accuracy_random_confusions(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            confusion = rng.integers(0, 20, size=(4, 4))
            report = compute_metrics(confusion)
            for c in report.class_ids:
                assert report.class_iou[c] <= report.class_acc[c] + 1e-12

    def test_absent_classes_excluded(self):
        confusion = np.zeros((3, 3), dtype=int)
        confusion[0, 0] = 5
        report = compute_metrics(confusion)
        assert report.class_ids == [0]
        assert report.miou == 1.0

    def test_bucket_partition_covers_classes(self):
        rng = np.random.default_rng(4)
        gt = rng.integers(0, 6, size=300)
        pred = rng.integers(0, 6, size=300)
        buckets = {0: "head", 1: "head", 2: "common", 3: "common", 4: "tail", 5: "tail"}
        confusion, miss = compute_confusion(pred, gt, 6)
        report = compute_metrics(confusion, miss, buckets)
        bucketed = []
        for b in ("head", "common", "tail"):
            members = [c for c in report.class_ids if buckets[c] == b]
            bucketed.extend(members)
            if members:
                assert report.bucket_miou[b] == pytest.approx(
                    np.mean([report.class_iou[c] for c in members])
                )
        assert sorted(bucketed) == report.class_ids

    def test_unlabeled_counts_as_error(self):
        gt = np.array([0, 0])
        pred = np.array([0, -1])
        report = evaluate(pred, gt, orthonormal_labels(1))
        assert report.class_acc[0] == 0.5
        assert report.unlabeled_points == 1
