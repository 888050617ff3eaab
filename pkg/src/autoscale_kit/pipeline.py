"""Dense-region refinement pipeline.

One pass works like the full method at inference time: predict on the
whole frame, pick the largest dense region (by density threshold in
regression mode, by low distance labels in localization mode), derive a
scale factor that brings the region's closeness level to the target
center, re-predict on the rescaled region, and stitch counts or points
back together.

Predictors stand in for the trained counting network.  OracleExact
answers queries from the ground-truth annotation and is internally
consistent across scales, so the stitched result reproduces the true
count; OracleNoisy perturbs the annotation once (jitter / drops /
spurious points) to exercise the metrics.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from .closeness import closeness_level
from .core import BBox, PointSet, bilinear_resize, connected_components, crop, round_half_up
from .l2s import L2SConfig
from .losses import ProbabilityVolume
from .mapgen import (
    DensityConfig,
    DistanceLabelMap,
    LabelConfig,
    density_map,
    distance_map,
    local_minima,
    quantize_labels,
)

REGRESSION = "regression"
LOCALIZATION = "localization"


@dataclass(frozen=True)
class Region:
    bbox: BBox
    scale: float
    source: str  # REGRESSION or LOCALIZATION

    def __post_init__(self):
        if not (0.5 <= self.scale <= 3.0):
            raise ValueError(f"scale {self.scale} outside [0.5, 3]")


@dataclass(frozen=True)
class PipelineConfig:
    target_center: float  # closeness level the rescaled region should reach
    j_r: float = 0.1  # minimum bbox area ratio, regression mode
    j_l: float = 0.02  # minimum bbox area ratio, localization mode
    c_thresh: int = 8  # labels below this mark candidate dense pixels
    density_cfg: DensityConfig = field(default_factory=lambda: DensityConfig(4.0))
    label_cfg: LabelConfig = field(default_factory=LabelConfig)
    l2s_cfg: L2SConfig = field(default_factory=L2SConfig)

    def __post_init__(self):
        if not (0 < self.j_r < 1 and 0 < self.j_l < 1):
            raise ValueError("area ratio thresholds must lie in (0, 1)")
        if not (0 < self.c_thresh < self.label_cfg.n_classes):
            raise ValueError("c_thresh must lie in (0, n_classes)")
        if not (np.isfinite(self.target_center) and self.target_center > 0):
            raise ValueError("target_center must be positive")


def _top_region_boxes(mask: np.ndarray, j: float, k: int) -> list[BBox]:
    """BBoxes of the k largest 8-connected components passing the area ratio."""
    comps = connected_components(mask, connectivity=8)
    if not comps:
        return []
    comps.sort(key=lambda c: -c.pixel_count)
    frame_area = mask.shape[0] * mask.shape[1]
    out = []
    for c in comps[:k]:
        if c.bbox.area / frame_area >= j:
            out.append(c.bbox)
    return out


def select_dense_region_regression(
    density: np.ndarray, j_r: float, k: int = 1
) -> BBox | list[BBox] | None:
    """Bbox of the largest component where density exceeds twice its mean.

    With k == 1 returns a single BBox or None; with k > 1 returns the list
    of accepted boxes for the k largest components.
    """
    mask = density > 2.0 * density.astype(np.float64).mean()
    boxes = _top_region_boxes(mask, j_r, k)
    if k == 1:
        return boxes[0] if boxes else None
    return boxes


def select_dense_region_localization(
    labels: DistanceLabelMap, c_thresh: int, j_l: float, k: int = 1
) -> BBox | list[BBox] | None:
    """Bbox of the largest component of pixels labeled below c_thresh."""
    if not (0 < c_thresh < labels.config.n_classes):
        raise ValueError("c_thresh must lie in (0, n_classes)")
    mask = labels.labels < c_thresh
    boxes = _top_region_boxes(mask, j_l, k)
    if k == 1:
        return boxes[0] if boxes else None
    return boxes


def analytic_scale(
    points_in_region: PointSet, target_center: float, cfg: L2SConfig = L2SConfig()
) -> tuple[float, bool]:
    """Closed-form center-loss minimizer for one region: sqrt(target / S), clamped.

    Regions with fewer than 2 points have no closeness level; those fall
    back to scale 1 and are flagged in the second return value.
    """
    if len(points_in_region) < 2:
        return 1.0, True
    s = closeness_level(points_in_region)
    r = float(np.sqrt(target_center / s))
    return float(np.clip(r, cfg.r_min, cfg.r_max)), False


def _scale_into_frame(points: PointSet, r: float) -> PointSet:
    """Scale a region-local point set onto the rounded output frame.

    Uses the effective per-axis factor out_dim / in_dim (the same ratio a
    raster resize realizes), so no point can land outside the rounded
    frame and the count is preserved for any r.
    """
    out_w = round_half_up(points.width * r)
    out_h = round_half_up(points.height * r)
    if out_w < 1 or out_h < 1:
        raise ValueError(f"scale {r} collapses the region")
    xy = points.xy * [out_w / points.width, out_h / points.height]
    if len(points):
        # guard the last-ulp case where x * (out/in) rounds up to out
        xy[:, 0] = np.minimum(xy[:, 0], np.nextafter(out_w, 0))
        xy[:, 1] = np.minimum(xy[:, 1], np.nextafter(out_h, 0))
    return PointSet(xy, out_w, out_h)


def regenerate_gt(
    points: PointSet, box: BBox, r: float, cfg: DensityConfig | LabelConfig
):
    """Ground truth for a rescaled region, regenerated from the annotation.

    Points inside the box are rescaled by r about the box origin and a
    fresh map is built with the same kernel sigma (density) or the same
    class edges (labels) as the frame-level ground truth.
    """
    if not (0.5 <= r <= 3.0):
        raise ValueError(f"scale {r} outside [0.5, 3]")
    local = _scale_into_frame(points.restrict(box), r)
    if isinstance(cfg, DensityConfig):
        return density_map(local, cfg)
    if isinstance(cfg, LabelConfig):
        if len(local) == 0:
            labels = np.full((local.height, local.width), cfg.background, dtype=np.uint8)
            return DistanceLabelMap(labels, cfg)
        return quantize_labels(distance_map(local), cfg)
    raise TypeError(f"unsupported config type {type(cfg).__name__}")


def stitch_count(
    initial: np.ndarray, box: BBox | None, refined: np.ndarray | None
) -> float:
    """Final count: total mass with the region's mass replaced by the re-prediction."""
    if (box is None) != (refined is None):
        raise ValueError("box and refined prediction must be given together")
    total = float(initial.astype(np.float64).sum())
    if box is None:
        return total
    inner = float(crop(initial, box).astype(np.float64).sum())
    return total - inner + float(refined.astype(np.float64).sum())


def stitch_points(
    initial: PointSet, box: BBox | None, refined: PointSet | None, r: float = 1.0
) -> PointSet:
    """Initial points outside the box plus refined points mapped back by 1/r."""
    if (box is None) != (refined is None):
        raise ValueError("box and refined points must be given together")
    if box is None:
        return initial
    outside = initial.xy[~initial.inside(box)]
    mapped = refined.xy / r + [box.x0, box.y0]
    if len(refined):
        # rounding the refined frame up can overshoot the box by < 1/r px
        mapped[:, 0] = np.clip(mapped[:, 0], 0, np.nextafter(initial.width, 0))
        mapped[:, 1] = np.clip(mapped[:, 1], 0, np.nextafter(initial.height, 0))
    return PointSet(np.concatenate([outside, mapped]), initial.width, initial.height)


class Predictor(ABC):
    """Source of density maps / class probability volumes for frame or region queries.

    Implementations must honor the output size contract: a query for box b
    at scale s returns round(b.width * s) x round(b.height * s) values, and
    must be deterministic (seeded where random).
    """

    width: int
    height: int

    @property
    def full_box(self) -> BBox:
        return BBox(0, 0, self.width, self.height)

    @abstractmethod
    def predict_density(self, box: BBox, scale: float) -> np.ndarray: ...

    @abstractmethod
    def predict_probabilities(self, box: BBox, scale: float) -> ProbabilityVolume: ...


def _resize_mass_preserving(region: np.ndarray, scale: float) -> np.ndarray:
    """Bilinear resize that keeps the region's total mass unchanged."""
    raw = bilinear_resize(region, scale).astype(np.float64)
    total = region.astype(np.float64).sum()
    raw_sum = raw.sum()
    if raw_sum > 0:
        raw *= total / raw_sum
    return raw.astype(np.float32)


class OracleExact(Predictor):
    """Perfect predictor backed by the annotation.

    Density queries return the ground-truth density field; region queries
    return the same field cropped and rescaled with its mass preserved, so
    region refinement is consistent with the full-frame prediction.
    Probability queries return one-hot volumes of the ground-truth
    distance-label map (regenerated from rescaled points for regions).
    """

    def __init__(
        self,
        annotation: PointSet,
        density_cfg: DensityConfig,
        label_cfg: LabelConfig = LabelConfig(),
    ):
        self.annotation = annotation
        self.density_cfg = density_cfg
        self.label_cfg = label_cfg
        self.width = annotation.width
        self.height = annotation.height
        self._density_cache: np.ndarray | None = None

    def _base_density(self) -> np.ndarray:
        if self._density_cache is None:
            self._density_cache = density_map(self.annotation, self.density_cfg)
        return self._density_cache

    def predict_density(self, box: BBox, scale: float) -> np.ndarray:
        base = self._base_density()
        if box == self.full_box and scale == 1.0:
            return base.copy()
        return _resize_mass_preserving(crop(base, box), scale)

    def predict_probabilities(self, box: BBox, scale: float) -> ProbabilityVolume:
        if box == self.full_box and scale == 1.0:
            if len(self.annotation) == 0:
                labels = np.full(
                    (self.height, self.width), self.label_cfg.background, np.uint8
                )
                return ProbabilityVolume.one_hot(DistanceLabelMap(labels, self.label_cfg))
            lm = quantize_labels(distance_map(self.annotation), self.label_cfg)
            return ProbabilityVolume.one_hot(lm)
        lm = regenerate_gt(self.annotation, box, scale, self.label_cfg)
        return ProbabilityVolume.one_hot(lm)


class OracleNoisy(OracleExact):
    """Oracle over a perturbed annotation: per-point Gaussian jitter, random
    drops, and Poisson-many spurious points, all drawn once per scene from
    the given seed."""

    def __init__(
        self,
        annotation: PointSet,
        density_cfg: DensityConfig,
        label_cfg: LabelConfig = LabelConfig(),
        jitter: float = 0.0,
        drop_prob: float = 0.0,
        spurious_rate: float = 0.0,
        seed: int = 0,
    ):
        if not (0 <= drop_prob <= 1) or jitter < 0 or spurious_rate < 0:
            raise ValueError("bad perturbation parameters")
        rng = np.random.default_rng(seed)
        xy = annotation.xy
        if len(annotation):
            xy = xy[rng.uniform(size=len(annotation)) >= drop_prob]
        if jitter > 0 and len(xy):
            xy = xy + rng.normal(0.0, jitter, size=xy.shape)
        n_spurious = rng.poisson(spurious_rate)
        extra = rng.uniform(
            [0.0, 0.0], [annotation.width, annotation.height], size=(n_spurious, 2)
        )
        xy = np.concatenate([xy, extra]) if len(xy) else extra
        if len(xy):
            keep = (
                (xy[:, 0] >= 0)
                & (xy[:, 0] < annotation.width)
                & (xy[:, 1] >= 0)
                & (xy[:, 1] < annotation.height)
            )
            xy = xy[keep]
        perturbed = PointSet(xy, annotation.width, annotation.height)
        super().__init__(perturbed, density_cfg, label_cfg)


class FilePredictor(Predictor):
    """Serves a stored density raster; region queries crop and rescale it."""

    def __init__(self, raster: np.ndarray):
        self.raster = raster.astype(np.float32)
        self.height, self.width = raster.shape

    def predict_density(self, box: BBox, scale: float) -> np.ndarray:
        if box == self.full_box and scale == 1.0:
            return self.raster.copy()
        return _resize_mass_preserving(crop(self.raster, box), scale)

    def predict_probabilities(self, box: BBox, scale: float) -> ProbabilityVolume:
        raise ValueError("a stored density raster cannot serve localization queries")


@dataclass(frozen=True)
class AutoScaleResult:
    final_count: float
    sparse_count: float
    region: Region | None
    points: PointSet | None
    r_used: float
    regions: tuple[Region, ...] = ()


def _expected_dims(box: BBox, scale: float) -> tuple[int, int]:
    return round_half_up(box.height * scale), round_half_up(box.width * scale)


def _accept_disjoint(boxes: list[BBox]) -> list[BBox]:
    """Drop boxes overlapping an earlier (larger-component) one; overlapping
    refinements would double-subtract shared pixels."""
    out: list[BBox] = []
    for b in boxes:
        clash = any(
            b.x0 < a.x1 and a.x0 < b.x1 and b.y0 < a.y1 and a.y0 < b.y1 for a in out
        )
        if not clash:
            out.append(b)
    return out


def run_autoscale(
    annotation: PointSet,
    predictor: Predictor,
    mode: str,
    cfg: PipelineConfig,
    top_k: int = 1,
) -> AutoScaleResult:
    """Full refinement pass: predict, select, rescale, re-predict, stitch."""
    if mode not in (REGRESSION, LOCALIZATION):
        raise ValueError(f"unknown mode {mode!r}")
    if (annotation.width, annotation.height) != (predictor.width, predictor.height):
        raise ValueError("annotation and predictor frame dimensions differ")
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    full = predictor.full_box

    if mode == REGRESSION:
        initial = predictor.predict_density(full, 1.0)
        if initial.shape != (annotation.height, annotation.width):
            raise ValueError("predictor violated the full-frame size contract")
        boxes = select_dense_region_regression(initial, cfg.j_r, k=top_k)
        boxes = _accept_disjoint(boxes if isinstance(boxes, list) else
                                 ([boxes] if boxes else []))
        initial_sum = float(initial.astype(np.float64).sum())
        final = initial_sum
        sparse = initial_sum
        regions = []
        for box in boxes:
            r, _ = analytic_scale(
                annotation.restrict(box), cfg.target_center, cfg.l2s_cfg
            )
            refined = predictor.predict_density(box, r)
            if refined.shape != _expected_dims(box, r):
                raise ValueError("predictor violated the region size contract")
            inner = float(crop(initial, box).astype(np.float64).sum())
            final += float(refined.astype(np.float64).sum()) - inner
            sparse -= inner
            regions.append(Region(box, r, REGRESSION))
        return AutoScaleResult(
            final_count=final,
            sparse_count=sparse,
            region=regions[0] if regions else None,
            points=None,
            r_used=regions[0].scale if regions else 1.0,
            regions=tuple(regions),
        )

    volume = predictor.predict_probabilities(full, 1.0)
    if volume.shape != (annotation.height, annotation.width):
        raise ValueError("predictor violated the full-frame size contract")
    labels = volume.argmax_labels(cfg.label_cfg)
    detections = local_minima(labels)
    boxes = select_dense_region_localization(labels, cfg.c_thresh, cfg.j_l, k=top_k)
    boxes = _accept_disjoint(boxes if isinstance(boxes, list) else
                             ([boxes] if boxes else []))
    keep = np.ones(len(detections), dtype=bool)
    for box in boxes:
        keep &= ~detections.inside(box)
    kept_xy = detections.xy[keep]
    sparse = float(np.count_nonzero(keep)) if boxes else float(len(detections))
    collected = [kept_xy]
    regions = []
    for box in boxes:
        r, _ = analytic_scale(annotation.restrict(box), cfg.target_center, cfg.l2s_cfg)
        refined_vol = predictor.predict_probabilities(box, r)
        if refined_vol.shape != _expected_dims(box, r):
            raise ValueError("predictor violated the region size contract")
        refined_pts = local_minima(refined_vol.argmax_labels(cfg.label_cfg))
        mapped = refined_pts.xy / r + [box.x0, box.y0]
        if len(refined_pts):
            mapped[:, 0] = np.clip(mapped[:, 0], 0, np.nextafter(annotation.width, 0))
            mapped[:, 1] = np.clip(mapped[:, 1], 0, np.nextafter(annotation.height, 0))
        collected.append(mapped)
        regions.append(Region(box, r, LOCALIZATION))
    xy = np.concatenate(collected) if collected else np.empty((0, 2))
    points = PointSet(xy, annotation.width, annotation.height)
    return AutoScaleResult(
        final_count=float(len(points)),
        sparse_count=sparse,
        region=regions[0] if regions else None,
        points=points,
        r_used=regions[0].scale if regions else 1.0,
        regions=tuple(regions),
    )
