import json

import numpy as np
import pytest

from mvov3d.fusion import OcclusionPolicy, fuse_multiview
from mvov3d.pipeline import (
    PipelineConfig,
    compute_point_features,
    improve_view_features,
    run_pipeline,
)
from mvov3d.query_eval import assign_labels, evaluate
from mvov3d.superpoint import compute_superpoints, pool_superpoints
from mvov3d.synthetic import SyntheticSpec, make_scene


@pytest.fixture(scope="module")
def noisy_scene():
    return make_scene(11, SyntheticSpec(noise_sigma=0.4))


class TestPipeline:
    def test_noise_free_perfect(self):
        scene = make_scene(0, SyntheticSpec(noise_sigma=0.0))
        result = run_pipeline(scene.cloud, scene.views, scene.labels)
        visible = result.point_features.valid
        assert visible.any()
        assert np.array_equal(result.pred_labels[visible], scene.cloud.labels[visible])
        assert result.report.miou == 1.0

    def test_composition_equals_staged_invocation(self, noisy_scene):
        scene = noisy_scene
        config = PipelineConfig()
        result = run_pipeline(scene.cloud, scene.views, scene.labels, config)

        # stage the modules by hand
        improved = [improve_view_features(v, config) for v in scene.views]
        fused = fuse_multiview(
            scene.cloud,
            scene.views,
            improved,
            policy=OcclusionPolicy(config.occlusion_mode, config.occlusion_threshold),
            depth_tolerance=config.depth_tolerance,
        )
        partition = compute_superpoints(
            scene.cloud, k=config.sp_knn, k_param=config.sp_k_param, min_size=config.sp_min_size
        )
        pooled = pool_superpoints(fused, partition)
        pred = assign_labels(pooled, scene.labels)
        report = evaluate(pred, scene.cloud.labels, scene.labels)

        assert np.array_equal(result.point_features.features, pooled.features)
        assert np.array_equal(result.pred_labels, pred)
        assert result.report.miou == report.miou

    def test_ablation_reduces_to_plain_fusion(self, noisy_scene):
        # --sp-disable --no-region --no-text must equal fusing the raw maps
        scene = noisy_scene
        config = PipelineConfig(use_region=False, use_text=False, sp_enabled=False)
        result = compute_point_features(scene.cloud, scene.views, config)
        baseline = fuse_multiview(
            scene.cloud, scene.views, [v.features for v in scene.views]
        )
        assert np.allclose(result.features, baseline.features)
        assert np.array_equal(result.count, baseline.count)

    def test_strong_noise_ablation_direction(self):
        # harsher noise than the acceptance check so the gaps are strict
        def acc(seed, **kw):
            s = make_scene(seed, SyntheticSpec(noise_sigma=3.0))
            res = run_pipeline(s.cloud, s.views, s.labels, PipelineConfig(**kw))
            return float((res.pred_labels == s.cloud.labels).mean())

        seeds = range(8)
        full = np.array([acc(s) for s in seeds])
        no_sp = np.array([acc(s, sp_enabled=False) for s in seeds])
        no_ref = np.array([acc(s, use_region=False, use_text=False) for s in seeds])
        assert full.mean() > no_sp.mean()
        assert full.mean() >= no_ref.mean()

    def test_no_text_only(self, noisy_scene):
        scene = noisy_scene
        config = PipelineConfig(use_text=False)
        result = run_pipeline(scene.cloud, scene.views, scene.labels, config)
        assert result.report is not None
