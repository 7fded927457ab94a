"""Command-line entry points.

Exit codes: 0 success, 2 validation failure, 3 pipeline error.
``MVOV3D_CONFIG`` may point at a JSON file of default pipeline settings.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .errors import LoadError, MVOV3DError
from .fusion import OcclusionPolicy, fuse_multiview
from .pipeline import PipelineConfig, compute_point_features, improve_view_features, run_pipeline
from .query_eval import LabelSet, assign_labels, compute_metrics, compute_confusion
from .sceneio import load_labels, load_scene, save_scene, validate_scene
from .superpoint import compute_superpoints
from .synthetic import SyntheticSpec, make_scene
from .tensorio import load_tensor, save_tensor

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_PIPELINE = 3

CONFIG_ENV = "MVOV3D_CONFIG"


def _config_defaults() -> dict:
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise LoadError(f"{path}: bad config profile ({exc})") from exc


def _add_pipeline_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--delta", type=float, default=None, help="text confidence threshold")
    parser.add_argument("--no-region", action="store_true", help="skip region feature maps")
    parser.add_argument("--no-text", action="store_true", help="skip text feature maps")
    parser.add_argument("--sp-disable", action="store_true", help="skip superpoint pooling")
    parser.add_argument("--sp-knn", type=int, default=None)
    parser.add_argument("--sp-k-param", type=float, default=None)
    parser.add_argument("--sp-min-size", type=int, default=None)
    parser.add_argument("--occlusion-mode", choices=["all", "occluded-only"], default=None)
    parser.add_argument("--occlusion-threshold", type=float, default=None)
    parser.add_argument("--depth-tolerance", type=float, default=None)
    parser.add_argument("--workers", type=int, default=None)


def _build_config(args: argparse.Namespace) -> PipelineConfig:
    config = PipelineConfig(**_config_defaults())
    if args.delta is not None:
        config.delta = args.delta
    if args.no_region:
        config.use_region = False
    if args.no_text:
        config.use_text = False
    if args.sp_disable:
        config.sp_enabled = False
    if args.sp_knn is not None:
        config.sp_knn = args.sp_knn
    if args.sp_k_param is not None:
        config.sp_k_param = args.sp_k_param
    if args.sp_min_size is not None:
        config.sp_min_size = args.sp_min_size
    if args.occlusion_mode is not None:
        config.occlusion_mode = "use-all" if args.occlusion_mode == "all" else args.occlusion_mode
    if args.occlusion_threshold is not None:
        config.occlusion_threshold = args.occlusion_threshold
    if args.depth_tolerance is not None:
        config.depth_tolerance = args.depth_tolerance
    if args.workers is not None:
        config.workers = args.workers
    return config


def _echo_config(config: PipelineConfig, out_dir: Path, extra: dict | None = None) -> None:
    doc = config.to_dict()
    if extra:
        doc.update(extra)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "run_config.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _cmd_synth(args) -> int:
    spec = SyntheticSpec(
        num_planes=args.planes,
        points_per_plane=args.points_per_plane,
        num_views=args.views,
        noise_sigma=args.noise,
        occluders=args.occluders,
    )
    scene = make_scene(args.seed, spec)
    manifest = save_scene(scene, args.out, scene_id=f"synthetic-{args.seed}")
    print(f"wrote {manifest}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    problems = validate_scene(args.scene)
    if problems:
        for p in problems:
            print(f"INVALID: {p}", file=sys.stderr)
        return EXIT_VALIDATION
    print("ok")
    return EXIT_OK


def _cmd_fuse(args) -> int:
    cloud, views = load_scene(args.scene)
    config = _build_config(args)
    improved = [improve_view_features(v, config) for v in views]
    policy = OcclusionPolicy(config.occlusion_mode, config.occlusion_threshold)
    fused = fuse_multiview(
        cloud, views, improved,
        policy=policy, depth_tolerance=config.depth_tolerance, workers=config.workers,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_tensor(out / "point_features.bin", fused.features.astype(np.float32))
    save_tensor(out / "point_counts.bin", fused.count.astype(np.int32))
    _echo_config(config, out, {"command": "fuse", "scene": str(args.scene)})
    print(f"fused {int(fused.valid.sum())}/{len(fused.count)} points")
    return EXIT_OK


def _cmd_superpoints(args) -> int:
    cloud, _views = load_scene(args.scene)
    config = _build_config(args)
    partition = compute_superpoints(
        cloud, k=config.sp_knn, k_param=config.sp_k_param, min_size=config.sp_min_size
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_tensor(out / "superpoints.bin", partition.labels.astype(np.int32))
    _echo_config(config, out, {"command": "superpoints", "scene": str(args.scene)})
    print(f"{partition.num_segments} superpoints over {len(partition.labels)} points")
    return EXIT_OK


def _cmd_query(args) -> int:
    cloud, views = load_scene(args.scene)
    labels = load_labels(args.labels)
    config = _build_config(args)
    features = compute_point_features(cloud, views, config)
    pred = assign_labels(features, labels)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_tensor(out / "pred_labels.bin", pred.astype(np.int32))
    _echo_config(config, out, {"command": "query", "scene": str(args.scene)})
    print(f"assigned labels for {int((pred != labels.ignore_id).sum())} points")
    return EXIT_OK


def _cmd_eval(args) -> int:
    pred = load_tensor(args.pred)
    gt = load_tensor(args.gt)
    if args.labels:
        labels = load_labels(args.labels)
        num_classes = len(labels)
        names = labels.names
        ignore = labels.ignore_id
    else:
        num_classes = int(max(pred.max(initial=0), gt.max(initial=0))) + 1
        names = None
        ignore = -1
    bucket_of = None
    if args.buckets:
        raw = json.loads(Path(args.buckets).read_text())
        bucket_of = {}
        for key, bucket in raw.items():
            if names and key in names:
                bucket_of[names.index(key)] = bucket
            else:
                bucket_of[int(key)] = bucket
    confusion, miss = compute_confusion(pred, gt, num_classes, ignore)
    report = compute_metrics(confusion, miss, bucket_of)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report.write_csv(out / "per_class.csv", names)
    report.write_summary(out / "summary.json")
    print(f"mIoU {100 * report.miou:.2f}%  mAcc {100 * report.macc:.2f}%")
    return EXIT_OK


def _cmd_run(args) -> int:
    cloud, views = load_scene(args.scene)
    labels = load_labels(args.labels) if args.labels else None
    config = _build_config(args)
    result = run_pipeline(cloud, views, labels, config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_tensor(out / "point_features.bin", result.point_features.features.astype(np.float32))
    save_tensor(out / "point_counts.bin", result.point_features.count.astype(np.int32))
    if result.pred_labels is not None:
        save_tensor(out / "pred_labels.bin", result.pred_labels.astype(np.int32))
    if result.report is not None:
        result.report.write_csv(out / "per_class.csv", labels.names if labels else None)
        result.report.write_summary(out / "summary.json")
        print(f"mIoU {100 * result.report.miou:.2f}%  mAcc {100 * result.report.macc:.2f}%")
    _echo_config(config, out, {"command": "run", "scene": str(args.scene)})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mvov3d", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a deterministic synthetic scene")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--planes", type=int, default=3)
    p.add_argument("--points-per-plane", type=int, default=100)
    p.add_argument("--views", type=int, default=3)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--occluders", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("validate", help="validate a scene directory or manifest")
    p.add_argument("scene")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("fuse", help="refine 2D features and fuse them onto points")
    p.add_argument("--scene", required=True)
    p.add_argument("--out", required=True)
    _add_pipeline_flags(p)
    p.set_defaults(func=_cmd_fuse)

    p = sub.add_parser("superpoints", help="compute the geometric superpoint partition")
    p.add_argument("--scene", required=True)
    p.add_argument("--out", required=True)
    _add_pipeline_flags(p)
    p.set_defaults(func=_cmd_superpoints)

    p = sub.add_parser("query", help="assign open-vocabulary labels to points")
    p.add_argument("--scene", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", required=True)
    _add_pipeline_flags(p)
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("eval", help="evaluate predictions against ground truth")
    p.add_argument("--gt", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--labels", default=None)
    p.add_argument("--buckets", default=None)
    p.add_argument("--out", default="eval_out")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("run", help="end-to-end pipeline on a scene")
    p.add_argument("--scene", required=True)
    p.add_argument("--labels", default=None)
    p.add_argument("--out", required=True)
    _add_pipeline_flags(p)
    p.set_defaults(func=_cmd_run)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LoadError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except MVOV3DError as exc:
        print(f"pipeline error [{args.command}]: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
