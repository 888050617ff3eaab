"""Raster and point-set primitives shared by every stage of the toolkit.

Rasters are plain numpy arrays of shape (height, width): float32 for
density and distance planes, uint8 for label planes.  Point coordinates
are continuous, with pixel (i, j) covering [j, j+1) x [i, i+1) and its
center at (j + 0.5, i + 0.5).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage


def round_half_up(x: float) -> int:
    """Round with halves going up (python round() is banker's rounding)."""
    return int(np.floor(x + 0.5))


@dataclass(frozen=True)
class BBox:
    """Half-open pixel rectangle: x in [x0, x1), y in [y0, y1)."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if not (0 <= self.x0 < self.x1 and 0 <= self.y0 < self.y1):
            raise ValueError(f"degenerate bbox {self}")

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    @property
    def area(self) -> int:
        return self.width * self.height

    def contains(self, x, y):
        """Vectorized half-open membership test for continuous coordinates."""
        return (
            (x >= self.x0) & (x < self.x1) & (y >= self.y0) & (y < self.y1)
        )


@dataclass(frozen=True)
class PointSet:
    """Annotated head locations on a frame of integer pixel dimensions.

    xy is an (n, 2) float64 array of (x, y) coordinates, all inside
    [0, width) x [0, height).
    """

    xy: np.ndarray
    width: int
    height: int

    def __post_init__(self):
        xy = np.asarray(self.xy, dtype=np.float64).reshape(-1, 2)
        object.__setattr__(self, "xy", xy)
        if self.width < 1 or self.height < 1:
            raise ValueError("frame dimensions must be >= 1")
        if xy.size and not np.all(np.isfinite(xy)):
            raise ValueError("point coordinates must be finite")
        if xy.size:
            ok = (
                (xy[:, 0] >= 0)
                & (xy[:, 0] < self.width)
                & (xy[:, 1] >= 0)
                & (xy[:, 1] < self.height)
            )
            if not ok.all():
                raise ValueError(
                    f"{np.count_nonzero(~ok)} point(s) outside the "
                    f"{self.width}x{self.height} frame"
                )

    def __len__(self) -> int:
        return self.xy.shape[0]

    @classmethod
    def empty(cls, width: int, height: int) -> "PointSet":
        return cls(np.empty((0, 2), dtype=np.float64), width, height)

    def inside(self, box: BBox) -> np.ndarray:
        """Boolean mask of points inside box (half-open membership)."""
        if len(self) == 0:
            return np.zeros(0, dtype=bool)
        return box.contains(self.xy[:, 0], self.xy[:, 1])

    def restrict(self, box: BBox) -> "PointSet":
        """Points inside box, re-expressed relative to the box origin."""
        sel = self.xy[self.inside(box)]
        return PointSet(sel - [box.x0, box.y0], box.width, box.height)


@dataclass(frozen=True)
class Component:
    """A connected component of a boolean mask."""

    pixel_count: int
    bbox: BBox


def crop(raster: np.ndarray, box: BBox) -> np.ndarray:
    """Copy the sub-raster covered by box."""
    h, w = raster.shape[:2]
    if box.x1 > w or box.y1 > h:
        raise ValueError(f"bbox {box} exceeds raster {w}x{h}")
    return raster[box.y0 : box.y1, box.x0 : box.x1].copy()


def bilinear_resize(raster: np.ndarray, factor: float) -> np.ndarray:
    """Resize a float raster by an isotropic factor.

    Output dimensions are round-half-up of the input dimensions times
    factor.  Samples are aligned on pixel centers and clamped at the
    borders, so every output value is a convex combination of inputs.
    """
    if not np.isfinite(factor) or factor <= 0:
        raise ValueError(f"scale factor must be finite and positive, got {factor}")
    h, w = raster.shape
    out_w = round_half_up(w * factor)
    out_h = round_half_up(h * factor)
    if out_w < 1 or out_h < 1:
        raise ValueError(f"factor {factor} collapses {w}x{h} to an empty raster")
    src = raster.astype(np.float64, copy=False)

    sx = (np.arange(out_w) + 0.5) * (w / out_w) - 0.5
    sy = (np.arange(out_h) + 0.5) * (h / out_h) - 0.5
    x0 = np.floor(sx).astype(np.int64)
    y0 = np.floor(sy).astype(np.int64)
    fx = sx - x0
    fy = sy - y0
    x0c = np.clip(x0, 0, w - 1)
    x1c = np.clip(x0 + 1, 0, w - 1)
    y0c = np.clip(y0, 0, h - 1)
    y1c = np.clip(y0 + 1, 0, h - 1)

    top = src[np.ix_(y0c, x0c)] * (1 - fx) + src[np.ix_(y0c, x1c)] * fx
    bot = src[np.ix_(y1c, x0c)] * (1 - fx) + src[np.ix_(y1c, x1c)] * fx
    out = top * (1 - fy)[:, None] + bot * fy[:, None]
    return out.astype(raster.dtype if raster.dtype == np.float64 else np.float32)


_STRUCT_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
_STRUCT_8 = np.ones((3, 3), dtype=bool)


def connected_components(mask: np.ndarray, connectivity: int = 8) -> list[Component]:
    """Label a boolean mask and return every component's size and bbox."""
    if connectivity not in (4, 8):
        raise ValueError("connectivity must be 4 or 8")
    structure = _STRUCT_4 if connectivity == 4 else _STRUCT_8
    labels, n = ndimage.label(mask, structure=structure)
    if n == 0:
        return []
    counts = np.bincount(labels.ravel())[1:]
    out = []
    for i, sl in enumerate(ndimage.find_objects(labels)):
        box = BBox(sl[1].start, sl[0].start, sl[1].stop, sl[0].stop)
        out.append(Component(int(counts[i]), box))
    return out


def scale_points(
    points: PointSet, factor: float, origin=(0.0, 0.0)
) -> tuple[PointSet, int]:
    """Scale point coordinates about an origin, onto a rescaled frame.

    The new frame is round-half-up of the old dimensions times factor.
    Points landing outside the new frame are dropped, not clamped
    (clamping would fabricate coincident points); the second return
    value counts the drops.
    """
    if not np.isfinite(factor) or factor <= 0:
        raise ValueError(f"scale factor must be finite and positive, got {factor}")
    new_w = round_half_up(points.width * factor)
    new_h = round_half_up(points.height * factor)
    if new_w < 1 or new_h < 1:
        raise ValueError(f"factor {factor} collapses the frame")
    xy = (points.xy - np.asarray(origin, dtype=np.float64)) * factor
    if len(points):
        keep = (xy[:, 0] >= 0) & (xy[:, 0] < new_w) & (xy[:, 1] >= 0) & (xy[:, 1] < new_h)
    else:
        keep = np.zeros(0, dtype=bool)
    dropped = int(len(points) - np.count_nonzero(keep))
    return PointSet(xy[keep], new_w, new_h), dropped
