"""Command-line interface: every operation as a subcommand.

Conventions shared by all subcommands:
  * JSON output has a fixed field order, a leading "version" field, and
    floats printed with 9 significant digits, so reruns are byte-identical.
  * exit 0 on success, 1 on validation errors (including unknown flags),
    2 on I/O errors.
  * randomized commands (synth, noisy predictors) require --seed.
  * AUTOSCALE_LOG=debug|info|warning selects log verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import fileio
from .closeness import ClosenessStats
from .core import BBox, PointSet
from .l2s import L2SConfig, fit
from .losses import ProbabilityVolume, dce_loss, mse_loss
from .mapgen import (
    DensityConfig,
    DistanceLabelMap,
    LabelConfig,
    density_map,
    distance_map,
    quantize_labels,
    value_histogram,
)
from .metrics import MatchConfig, count_errors, game, knn_sigma, match_points, prf
from .pipeline import (
    FilePredictor,
    OracleExact,
    OracleNoisy,
    PipelineConfig,
    run_autoscale,
    select_dense_region_localization,
    select_dense_region_regression,
)
from .synth import RNG_ALGORITHM, PoissonProcess, SceneSpec, ThomasProcess, generate

log = logging.getLogger("autoscale_kit")

JSON_VERSION = 1


def render_json(obj) -> str:
    """Serialize with insertion-order fields and 9-significant-digit floats."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".9g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(render_json(v) for v in obj) + "]"
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {render_json(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_text_atomic(path, text: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w") as f:
        f.write(text)
    os.replace(tmp, path)


def emit(report: dict, path=None) -> None:
    text = render_json(report)
    if path:
        write_text_atomic(path, text + "\n")
    print(text)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; the CLI contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ValueError(f"expected comma-separated numbers, got {text!r}")


def _parse_bbox(text: str) -> BBox:
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError(f"expected x0,y0,x1,y1, got {text!r}")
    return BBox(*(int(p) for p in parts))


def _read_points_any_frame(path) -> PointSet:
    """Points for evaluation: frame dims from the header, else a hull frame."""
    try:
        return fileio.read_points(path)
    except ValueError:
        xs, ys = [], []
        with open(path) as f:
            for raw in f:
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                sx, sy = line.split(",")
                xs.append(float(sx))
                ys.append(float(sy))
        if not xs:
            return PointSet.empty(1, 1)
        w = int(np.floor(max(xs))) + 1
        h = int(np.floor(max(ys))) + 1
        return PointSet(np.column_stack([xs, ys]), w, h)


def _label_config_for(n_classes: int) -> LabelConfig:
    # CRMP label files carry only the class count; synthesize placeholder
    # edges since the loss needs class identities, not distances
    return LabelConfig(edges=tuple(range(1, n_classes)))


# ---------------------------------------------------------------- subcommands


def cmd_gen_density(args) -> int:
    points = fileio.read_points(args.points, args.width, args.height)
    cfg = DensityConfig(args.sigma, args.kernel_radius)
    dens = density_map(points, cfg)
    fileio.write_raster(args.out, dens)
    emit({
        "version": JSON_VERSION,
        "points": len(points),
        "sum": float(dens.sum(dtype=np.float64)),
        "out": args.out,
    })
    return 0


def cmd_gen_labels(args) -> int:
    points = fileio.read_points(args.points, args.width, args.height)
    cfg = LabelConfig(tuple(_parse_floats(args.edges)))
    if len(points) == 0:
        labels = DistanceLabelMap(
            np.full((points.height, points.width), cfg.background, np.uint8), cfg
        )
    else:
        labels = quantize_labels(distance_map(points), cfg)
    fileio.write_raster(args.out, labels.labels)
    if args.pgm:
        fileio.write_pgm(args.pgm, labels.labels, cfg.n_classes)
    emit({
        "version": JSON_VERSION,
        "points": len(points),
        "classes": cfg.n_classes,
        "out": args.out,
    })
    return 0


def cmd_histogram(args) -> int:
    raster = fileio.read_raster(args.map)
    if raster.ndim != 2:
        raise ValueError("histogram expects a single-plane raster")
    res = value_histogram(raster, args.bins)
    lines = ["bin_lo,bin_hi,count"]
    for lo, hi, c in zip(res.bin_edges[:-1], res.bin_edges[1:], res.counts):
        lines.append(f"{lo:.9g},{hi:.9g},{int(c)}")
    write_text_atomic(args.csv, "\n".join(lines) + "\n")
    if args.plot:
        from . import viz

        viz.save_histogram_figure(args.plot, res)
    emit({
        "version": JSON_VERSION,
        "bins": args.bins,
        "positive_pixels": res.n_positive,
        "tail_ratio": res.tail_ratio,
    })
    return 0


def cmd_closeness(args) -> int:
    points = fileio.read_points(args.points, args.width, args.height)
    if args.bbox:
        points = points.restrict(_parse_bbox(args.bbox))
    if len(points) < 2:
        raise ValueError(f"closeness level needs >= 2 points, found {len(points)}")
    stats = ClosenessStats.from_points(points)
    emit({
        "version": JSON_VERSION,
        "s": stats.level,
        "count": stats.count,
        "nn_min": float(stats.nn.min()),
        "nn_median": float(np.median(stats.nn)),
        "nn_max": float(stats.nn.max()),
    })
    return 0


def cmd_fit_l2s(args) -> int:
    levels = _parse_floats(args.closeness)
    cfg = L2SConfig(
        r_min=args.rmin,
        r_max=args.rmax,
        alpha=args.alpha,
        eta=args.eta,
        update_interval=args.update_interval,
        max_iters=args.max_iters,
        tol=args.tol,
    )
    init = None
    if args.center is not None:
        from .l2s import L2SState

        init = L2SState(np.ones(len(levels)), args.center, 0, [])
    state = fit(levels, cfg, init)
    if args.trace:
        lines = ["iter,loss,center"]
        for i, (loss_v, c_v) in enumerate(zip(state.loss_trace, state.center_trace)):
            lines.append(f"{i},{loss_v:.9g},{c_v:.9g}")
        write_text_atomic(args.trace, "\n".join(lines) + "\n")
    if args.plot:
        from . import viz

        viz.save_trace_figure(args.plot, state.loss_trace, state.center_trace)
    emit({
        "version": JSON_VERSION,
        "r": [float(v) for v in state.r],
        "center": state.center,
        "loss": state.loss_trace[-1],
        "iters": state.iters,
    })
    return 0


def cmd_loss(args) -> int:
    if args.kind == "mse":
        pred = fileio.read_raster(args.pred)
        gt = fileio.read_raster(args.gt)
        value = mse_loss(pred, gt, mean=args.mean)
    else:
        planes = fileio.read_raster(args.probs)
        if planes.ndim != 3:
            raise ValueError("dce expects a probability stack (CRMP dtype 2)")
        labels = fileio.read_raster(args.gt)
        if labels.dtype != np.uint8:
            raise ValueError("dce ground truth must be a u8 label raster")
        cfg = _label_config_for(planes.shape[0])
        pv = ProbabilityVolume(planes)
        pv.validate()
        value = dce_loss(pv, DistanceLabelMap(labels, cfg))
    emit({"version": JSON_VERSION, "kind": args.kind, "loss": value})
    return 0


def cmd_select(args) -> int:
    if args.map:
        raster = fileio.read_raster(args.map)
    elif args.points:
        points = fileio.read_points(args.points, args.width, args.height)
        if args.mode == "regression":
            raster = density_map(points, DensityConfig(args.sigma))
        else:
            cfg = LabelConfig(tuple(_parse_floats(args.edges)))
            raster = quantize_labels(distance_map(points), cfg).labels
    else:
        raise ValueError("select needs --map or --points")

    if args.mode == "regression":
        if raster.dtype == np.uint8:
            raise ValueError("regression selection expects a density raster")
        box = select_dense_region_regression(raster, args.jr)
    else:
        if raster.dtype != np.uint8:
            raise ValueError("localization selection expects a u8 label raster")
        n_classes = max(int(raster.max()) + 1, args.c_thresh + 1)
        lm = DistanceLabelMap(raster, _label_config_for(n_classes))
        box = select_dense_region_localization(lm, args.c_thresh, args.jl)
    region = None
    if box is not None:
        region = {"x0": box.x0, "y0": box.y0, "x1": box.x1, "y1": box.y1}
    emit({"version": JSON_VERSION, "mode": args.mode, "region": region})
    return 0


def _region_json(result):
    if result.region is None:
        return None
    b = result.region.bbox
    return {
        "x0": b.x0, "y0": b.y0, "x1": b.x1, "y1": b.y1,
        "scale": result.region.scale,
    }


def _scene_report(result) -> dict:
    pts = None
    if result.points is not None:
        pts = [[float(x), float(y)] for x, y in result.points.xy]
    return {
        "final_count": result.final_count,
        "sparse_count": result.sparse_count,
        "region": _region_json(result),
        "points": pts,
        "r_used": result.r_used,
    }


def _build_predictor(args, annotation, density_cfg, label_cfg, seed, pred_map):
    if args.predictor == "oracle":
        return OracleExact(annotation, density_cfg, label_cfg)
    if args.predictor == "noisy":
        if seed is None:
            raise ValueError("--seed is required with the noisy predictor")
        return OracleNoisy(
            annotation, density_cfg, label_cfg,
            jitter=args.sigma_jitter, drop_prob=args.drop,
            spurious_rate=args.spurious, seed=seed,
        )
    if args.predictor == "file":
        if args.mode != "regression":
            raise ValueError("the file predictor serves regression mode only")
        if not pred_map:
            raise ValueError("--pred-map is required with the file predictor")
        raster = fileio.read_raster(pred_map)
        if raster.shape != (annotation.height, annotation.width):
            raise ValueError("prediction raster does not match the annotation frame")
        return FilePredictor(raster)
    raise ValueError(f"unknown predictor {args.predictor!r}")


def _autoscale_one(args, points_path, pred_map, cfg, seed):
    annotation = fileio.read_points(points_path, args.width, args.height)
    predictor = _build_predictor(args, annotation, cfg.density_cfg,
                                 cfg.label_cfg, seed, pred_map or args.pred_map)
    result = run_autoscale(annotation, predictor, args.mode, cfg, top_k=args.top_k)
    return annotation, predictor, result


# manifest config keys and the flag defaults they may fill in
_MANIFEST_DEFAULTS = {
    "sigma": 4.0,
    "edges": "1,2,3,4,6,8,12,16,24,32",
    "j_r": 0.1,
    "j_l": 0.02,
    "c_thresh": 8,
    "target_center": None,
    "seed": None,
}
_MANIFEST_TO_FLAG = {"j_r": "jr", "j_l": "jl"}


def _merge_manifest_config(args, config: dict) -> None:
    """Fill flags still at their defaults from the manifest's global config."""
    for key, default in _MANIFEST_DEFAULTS.items():
        if key not in config:
            continue
        attr = _MANIFEST_TO_FLAG.get(key, key)
        if getattr(args, attr) == default:
            value = config[key]
            if key == "edges" and not isinstance(value, str):
                value = ",".join(str(v) for v in value)
            setattr(args, attr, value)


def cmd_autoscale(args) -> int:
    manifest = None
    if args.manifest:
        with open(args.manifest) as f:
            manifest = json.load(f)
        _merge_manifest_config(args, manifest.get("config", {}))
    if args.target_center is None:
        raise ValueError(
            "--target-center is required (as a flag or in the manifest config)"
        )
    edges = tuple(_parse_floats(args.edges))
    cfg = PipelineConfig(
        target_center=args.target_center,
        j_r=args.jr,
        j_l=args.jl,
        c_thresh=args.c_thresh,
        density_cfg=DensityConfig(args.sigma),
        label_cfg=LabelConfig(edges),
    )
    if manifest is not None:
        scenes = manifest.get("scenes", [])
        if not scenes:
            raise ValueError("manifest lists no scenes")
        for entry in scenes:
            if not os.path.exists(entry["points"]):
                raise OSError(f"manifest points file missing: {entry['points']}")
        base_seed = args.seed

        def work(item):
            idx, entry = item
            seed = None if base_seed is None else base_seed + idx
            _, _, result = _autoscale_one(
                args, entry["points"], entry.get("pred_map"), cfg, seed
            )
            gt_count = len(fileio.read_points(entry["points"],
                                              args.width, args.height))
            rep = _scene_report(result)
            rep["points_file"] = entry["points"]
            rep["gt_count"] = gt_count
            return rep

        with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
            reports = list(pool.map(work, enumerate(scenes)))
        mae, mse = count_errors(
            [r["final_count"] for r in reports], [r["gt_count"] for r in reports]
        )
        emit({
            "version": JSON_VERSION,
            "mode": args.mode,
            "scenes": reports,
            "summary": {"mae": mae, "mse": mse},
        }, args.report)
        return 0

    if not args.points:
        raise ValueError("autoscale needs --points or --manifest")
    annotation, predictor, result = _autoscale_one(
        args, args.points, args.pred_map, cfg, args.seed
    )
    report = {"version": JSON_VERSION, "mode": args.mode}
    report.update(_scene_report(result))
    emit(report, args.report)
    if args.plot:
        from . import viz

        if args.mode == "regression":
            raster = predictor.predict_density(predictor.full_box, 1.0)
        else:
            vol = predictor.predict_probabilities(predictor.full_box, 1.0)
            raster = vol.argmax_labels(cfg.label_cfg).labels
        viz.save_scene_figure(args.plot, raster, result.region, result.points,
                              title=f"{args.mode} final={result.final_count:.2f}")
    return 0


def cmd_eval_count(args) -> int:
    def read_counts(path):
        vals = []
        with open(path) as f:
            for raw in f:
                line = raw.strip()
                if line and not line.startswith("#"):
                    vals.append(float(line))
        return vals

    mae, mse = count_errors(read_counts(args.pred), read_counts(args.gt))
    emit({"version": JSON_VERSION, "mae": mae, "mse": mse})
    return 0


def cmd_eval_loc(args) -> int:
    pred = _read_points_any_frame(args.pred)
    gt = _read_points_any_frame(args.gt)
    if args.sigma == "knn":
        if len(gt) < 2:
            raise ValueError("knn thresholds need >= 2 ground-truth points")
        sigma = knn_sigma(gt)
    else:
        sigma = float(args.sigma)
    cfg = MatchConfig(sigma, "optimal" if args.optimal else "greedy")
    m = match_points(pred, gt, cfg)
    p, r, f = prf(m)
    emit({
        "version": JSON_VERSION,
        "precision": p,
        "recall": r,
        "f": f,
        "tp": m.tp,
        "fp": m.fp,
        "fn": m.fn,
    })
    return 0


def cmd_game(args) -> int:
    raster = fileio.read_raster(args.pred)
    if raster.ndim != 2 or raster.dtype == np.uint8:
        raise ValueError("game expects a float density raster")
    h, w = raster.shape
    gt = fileio.read_points(args.gt, w, h)
    value = game(raster, gt, args.n)
    emit({"version": JSON_VERSION, "n": args.n, "game": value})
    return 0


def cmd_synth(args) -> int:
    if args.process == "poisson":
        if args.intensity is None:
            raise ValueError("poisson process needs --intensity")
        proc = PoissonProcess(args.intensity)
    else:
        if args.parents is None or args.mu is None or args.spread is None:
            raise ValueError("thomas process needs --parents, --mu and --spread")
        proc = ThomasProcess(args.parents, args.mu, args.spread)
    spec = SceneSpec(args.w, args.h, proc, args.seed)
    points = generate(spec)
    fileio.write_points(
        args.out, points,
        extra_comments={"rng": RNG_ALGORITHM, "seed": args.seed,
                        "process": args.process},
    )
    emit({"version": JSON_VERSION, "points": len(points), "out": args.out})
    return 0


def cmd_bench(args) -> int:
    rng = np.random.default_rng(0)
    size = args.size
    n = args.points
    pts = PointSet(rng.uniform(0, [size, size], size=(n, 2)), size, size)
    rows = []

    t0 = time.perf_counter()
    density_map(pts, DensityConfig(8.0))
    rows.append(("density_map", f"{size}x{size}, {n} pts, sigma 8",
                 time.perf_counter() - t0))

    t0 = time.perf_counter()
    distance_map(pts)
    rows.append(("distance_map", f"{size}x{size}, {n} pts",
                 time.perf_counter() - t0))

    pred = PointSet(rng.uniform(0, [size, size], size=(n, 2)), size, size)
    for strategy in ("greedy", "optimal"):
        t0 = time.perf_counter()
        match_points(pred, pts, MatchConfig(4.0, strategy))
        rows.append((f"match_points[{strategy}]", f"{n} vs {n} pts, sigma 4",
                     time.perf_counter() - t0))

    width = max(len(r[0]) for r in rows)
    print(f"{'operation':<{width}}  {'workload':<28}  seconds")
    for name, desc, secs in rows:
        print(f"{name:<{width}}  {desc:<28}  {secs:8.4f}")
    return 0


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="autoscale-kit",
                     description="crowd counting ground truth, scaling and evaluation toolkit")
    sub = parser.add_subparsers(dest="command", metavar="subcommand")
    sub.required = True

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("gen-density", cmd_gen_density, "ground-truth density map from points")
    p.add_argument("--points", required=True)
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--kernel-radius", type=int, dest="kernel_radius")
    p.add_argument("--out", required=True)

    p = add("gen-labels", cmd_gen_labels, "distance-label map from points")
    p.add_argument("--points", required=True)
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--edges", default="1,2,3,4,6,8,12,16,24,32")
    p.add_argument("--out", required=True)
    p.add_argument("--pgm")

    p = add("histogram", cmd_histogram, "pixel-value histogram of a raster")
    p.add_argument("--map", required=True)
    p.add_argument("--bins", type=int, required=True)
    p.add_argument("--csv", required=True)
    p.add_argument("--plot")

    p = add("closeness", cmd_closeness, "closeness level of a point set")
    p.add_argument("--points", required=True)
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--bbox")

    p = add("fit-l2s", cmd_fit_l2s, "fit scale factors by center-loss descent")
    p.add_argument("--closeness", required=True,
                   help="comma-separated closeness levels")
    p.add_argument("--alpha", type=float, default=1e-3)
    p.add_argument("--eta", type=float, default=1e-3)
    p.add_argument("--rmin", type=float, default=0.5)
    p.add_argument("--rmax", type=float, default=3.0)
    p.add_argument("--max-iters", type=int, default=10000, dest="max_iters")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--update-interval", type=int, default=1, dest="update_interval")
    p.add_argument("--center", type=float, help="initial center (default: mean level)")
    p.add_argument("--trace", help="write iter,loss,center CSV here")
    p.add_argument("--plot")

    p = add("loss", cmd_loss, "evaluate a training objective")
    loss_sub = p.add_subparsers(dest="kind", metavar="kind")
    loss_sub.required = True
    pm = loss_sub.add_parser("mse", help="summed squared error between two rasters")
    pm.set_defaults(func=cmd_loss)
    pm.add_argument("--pred", required=True)
    pm.add_argument("--gt", required=True)
    pm.add_argument("--mean", action="store_true")
    pd = loss_sub.add_parser("dce", help="dynamic cross-entropy of a probability stack")
    pd.set_defaults(func=cmd_loss)
    pd.add_argument("--probs", required=True)
    pd.add_argument("--gt", required=True)

    p = add("select", cmd_select, "dense-region selection")
    p.add_argument("--mode", choices=["regression", "localization"], required=True)
    p.add_argument("--map")
    p.add_argument("--points")
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--sigma", type=float, default=4.0)
    p.add_argument("--edges", default="1,2,3,4,6,8,12,16,24,32")
    p.add_argument("--jr", type=float, default=0.1)
    p.add_argument("--jl", type=float, default=0.02)
    p.add_argument("--c-thresh", type=int, default=8, dest="c_thresh")

    p = add("autoscale", cmd_autoscale, "full refine-and-stitch pipeline")
    p.add_argument("--points")
    p.add_argument("--manifest", help="JSON manifest for multi-scene runs")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--mode", choices=["regression", "localization"], required=True)
    p.add_argument("--predictor", choices=["oracle", "noisy", "file"], required=True)
    p.add_argument("--target-center", type=float, dest="target_center",
                   help="required here or in the manifest config")
    p.add_argument("--sigma", type=float, default=4.0)
    p.add_argument("--edges", default="1,2,3,4,6,8,12,16,24,32")
    p.add_argument("--jr", type=float, default=0.1)
    p.add_argument("--jl", type=float, default=0.02)
    p.add_argument("--c-thresh", type=int, default=8, dest="c_thresh")
    p.add_argument("--top-k", type=int, default=1, dest="top_k")
    p.add_argument("--sigma-jitter", type=float, default=0.0, dest="sigma_jitter")
    p.add_argument("--drop", type=float, default=0.0)
    p.add_argument("--spurious", type=float, default=0.0)
    p.add_argument("--seed", type=int)
    p.add_argument("--pred-map", dest="pred_map")
    p.add_argument("--report", required=True)
    p.add_argument("--plot")

    p = add("eval-count", cmd_eval_count, "MAE / MSE over per-image counts")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)

    p = add("eval-loc", cmd_eval_loc, "precision / recall / F of point matching")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--sigma", required=True, help="pixel threshold or 'knn'")
    p.add_argument("--optimal", action="store_true")

    p = add("game", cmd_game, "grid average mean absolute error")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--n", type=int, required=True)

    p = add("synth", cmd_synth, "generate a seeded synthetic scene")
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--process", choices=["poisson", "thomas"], required=True)
    p.add_argument("--intensity", type=float)
    p.add_argument("--parents", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--spread", type=float)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = add("bench", cmd_bench, "time the heavy operations")
    p.add_argument("--size", type=int, default=512)
    p.add_argument("--points", type=int, default=500)

    return parser


def main(argv=None) -> int:
    level = os.environ.get("AUTOSCALE_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    try:
        return args.func(args) or 0
    except OSError as e:
        log.error("%s", e)
        print(f"i/o error: {e}", file=sys.stderr)
        return 2
    except (ValueError, TypeError) as e:
        log.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
