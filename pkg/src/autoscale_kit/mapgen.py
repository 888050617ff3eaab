"""Ground-truth map construction and the local-minima localization primitive.

Density maps place one unit-mass Gaussian blob per annotated point, so the
map integrates to the person count.  Distance maps hold the exact Euclidean
distance from each pixel center to the nearest annotation; quantizing them
into ordered classes yields distance-label maps whose regional minima mark
head locations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .core import PointSet

DEFAULT_EDGES = (1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0)


@dataclass(frozen=True)
class DensityConfig:
    """Gaussian blob parameters. kernel_radius defaults to ceil(3 sigma)."""

    sigma: float
    kernel_radius: int | None = None

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.kernel_radius is None:
            object.__setattr__(self, "kernel_radius", int(np.ceil(3 * self.sigma)))
        elif self.kernel_radius < 1:
            raise ValueError("kernel_radius must be >= 1")


@dataclass(frozen=True)
class LabelConfig:
    """Distance quantization: len(edges) + 1 ordered classes."""

    edges: tuple = DEFAULT_EDGES

    def __post_init__(self):
        edges = tuple(float(e) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        if len(edges) < 1:
            raise ValueError("need at least one edge")
        if any(e <= 0 for e in edges) or any(
            b <= a for a, b in zip(edges, edges[1:])
        ):
            raise ValueError("edges must be strictly increasing and positive")
        if len(edges) + 1 > 255:
            raise ValueError("too many classes for u8 labels")

    @property
    def n_classes(self) -> int:
        return len(self.edges) + 1

    @property
    def background(self) -> int:
        return self.n_classes - 1


@dataclass(frozen=True)
class DistanceLabelMap:
    labels: np.ndarray  # (h, w) uint8
    config: LabelConfig

    def __post_init__(self):
        if self.labels.dtype != np.uint8:
            raise ValueError("labels must be uint8")
        if self.labels.size and int(self.labels.max()) >= self.config.n_classes:
            raise ValueError("label exceeds class count")


def density_map(points: PointSet, cfg: DensityConfig) -> np.ndarray:
    """Sum of one truncated, renormalized Gaussian window per point.

    Each window is evaluated at pixel centers relative to the continuous
    point coordinate, clipped at the frame borders and rescaled to sum to
    exactly 1, so the full map integrates to len(points) regardless of
    border effects.
    """
    h, w = points.height, points.width
    acc = np.zeros((h, w), dtype=np.float64)
    r = cfg.kernel_radius
    inv = 1.0 / (2.0 * cfg.sigma * cfg.sigma)
    for x, y in points.xy:
        cx = int(np.floor(x))
        cy = int(np.floor(y))
        x0, x1 = max(cx - r, 0), min(cx + r + 1, w)
        y0, y1 = max(cy - r, 0), min(cy + r + 1, h)
        dx = (np.arange(x0, x1) + 0.5) - x
        dy = (np.arange(y0, y1) + 0.5) - y
        k = np.exp(-(dy[:, None] ** 2 + dx[None, :] ** 2) * inv)
        acc[y0:y1, x0:x1] += k / k.sum()
    return acc.astype(np.float32)


@dataclass(frozen=True)
class HistogramResult:
    bin_edges: np.ndarray
    counts: np.ndarray
    tail_ratio: float | None  # p99 / median of positive pixels; None if no positives
    n_positive: int


def value_histogram(raster: np.ndarray, bins: int) -> HistogramResult:
    """Histogram of strictly positive pixel values, plus a tail-weight ratio."""
    if bins < 2:
        raise ValueError("bins must be >= 2")
    pos = np.asarray(raster, dtype=np.float64)
    pos = pos[pos > 0]
    if pos.size == 0:
        edges = np.linspace(0.0, 1.0, bins + 1)
        return HistogramResult(edges, np.zeros(bins, dtype=np.int64), None, 0)
    counts, edges = np.histogram(pos, bins=bins)
    tail = float(np.percentile(pos, 99) / np.median(pos))
    return HistogramResult(edges, counts, tail, int(pos.size))


def distance_map(points: PointSet) -> np.ndarray:
    """Exact Euclidean distance from every pixel center to the nearest point."""
    if len(points) == 0:
        raise ValueError("distance map undefined for an empty point set")
    h, w = points.height, points.width
    ys, xs = np.mgrid[0:h, 0:w]
    centers = np.column_stack([(xs + 0.5).ravel(), (ys + 0.5).ravel()])
    d, _ = cKDTree(points.xy).query(centers, k=1)
    return d.reshape(h, w).astype(np.float32)


def quantize_labels(dist: np.ndarray, cfg: LabelConfig) -> DistanceLabelMap:
    """Class k covers [edges[k-1], edges[k]); beyond the last edge is background."""
    edges = np.asarray(cfg.edges, dtype=np.float64)
    labels = np.searchsorted(edges, dist.astype(np.float64), side="right")
    return DistanceLabelMap(labels.astype(np.uint8), cfg)


_SHIFTS = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]


def _plateau_components(labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Partition into 8-connected constant-value plateaus.

    Returns (component id map starting at 1, per-component value array
    indexed by id).
    """
    comp = np.zeros(labels.shape, dtype=np.int64)
    values = [0]  # id 0 unused
    offset = 0
    struct = np.ones((3, 3), dtype=bool)
    for v in np.unique(labels):
        lab, n = ndimage.label(labels == v, structure=struct)
        sel = lab > 0
        comp[sel] = lab[sel] + offset
        values.extend([int(v)] * n)
        offset += n
    return comp, np.asarray(values)


def local_minima(label_map: DistanceLabelMap) -> PointSet:
    """Centroids of plateau components strictly below all outside neighbors.

    Background-class plateaus never count as detections.  Centroids are
    means of member pixel centers, so single-pixel plateaus detect at the
    pixel center.
    """
    labels = label_map.labels
    h, w = labels.shape
    comp, values = _plateau_components(labels)
    bad = values >= label_map.config.background  # background excluded
    lab_i = labels.astype(np.int16)
    for dy, dx in _SHIFTS:
        src = (slice(max(dy, 0), h + min(dy, 0)), slice(max(dx, 0), w + min(dx, 0)))
        dst = (slice(max(-dy, 0), h + min(-dy, 0)), slice(max(-dx, 0), w + min(-dx, 0)))
        viol = (comp[dst] != comp[src]) & (lab_i[src] <= lab_i[dst])
        if viol.any():
            bad[np.unique(comp[dst][viol])] = True
    ids = comp.ravel()
    keep = ~bad[ids]
    if not keep.any():
        return PointSet.empty(w, h)
    n_ids = len(values)
    cnt = np.bincount(ids[keep], minlength=n_ids).astype(np.float64)
    ys, xs = np.mgrid[0:h, 0:w]
    sx = np.bincount(ids[keep], weights=(xs.ravel() + 0.5)[keep], minlength=n_ids)
    sy = np.bincount(ids[keep], weights=(ys.ravel() + 0.5)[keep], minlength=n_ids)
    good = cnt > 0
    xy = np.column_stack([sx[good] / cnt[good], sy[good] / cnt[good]])
    # a centroid of in-frame pixel centers is always strictly inside the frame
    return PointSet(xy, w, h)
