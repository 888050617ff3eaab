"""Shared test helpers: independent oracles and scene builders."""

from collections import deque

import numpy as np

from autoscale_kit.core import PointSet


def flood_fill_components(mask, connectivity):
    """Exhaustive BFS labeling; returns list of (pixel_count, x0, y0, x1, y1)."""
    h, w = mask.shape
    seen = np.zeros_like(mask, dtype=bool)
    if connectivity == 4:
        steps = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    else:
        steps = [(dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1)
                 if (dy, dx) != (0, 0)]
    out = []
    for sy in range(h):
        for sx in range(w):
            if not mask[sy, sx] or seen[sy, sx]:
                continue
            q = deque([(sy, sx)])
            seen[sy, sx] = True
            count = 0
            x0 = x1 = sx
            y0 = y1 = sy
            while q:
                y, x = q.popleft()
                count += 1
                x0, x1 = min(x0, x), max(x1, x)
                y0, y1 = min(y0, y), max(y1, y)
                for dy, dx in steps:
                    ny, nx = y + dy, x + dx
                    if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not seen[ny, nx]:
                        seen[ny, nx] = True
                        q.append((ny, nx))
            out.append((count, x0, y0, x1 + 1, y1 + 1))
    return out


def brute_force_distance(points: PointSet) -> np.ndarray:
    """Per-pixel minimum over all points, O(pixels x points)."""
    h, w = points.height, points.width
    ys, xs = np.mgrid[0:h, 0:w]
    cx = xs + 0.5
    cy = ys + 0.5
    best = np.full((h, w), np.inf)
    for x, y in points.xy:
        best = np.minimum(best, np.sqrt((cx - x) ** 2 + (cy - y) ** 2))
    return best.astype(np.float32)


def pairwise_nn(xy) -> np.ndarray:
    """O(n^2) loop oracle for nearest-neighbor distances.

    Distance is sqrt(dx*dx + dy*dy) in float64, the conventional form
    (np.hypot rounds differently in the last ulp).
    """
    import math

    n = len(xy)
    out = np.empty(n)
    for i in range(n):
        best = np.inf
        for j in range(n):
            if i != j:
                dx = float(xy[i][0]) - float(xy[j][0])
                dy = float(xy[i][1]) - float(xy[j][1])
                best = min(best, math.sqrt(dx * dx + dy * dy))
        out[i] = best
    return out


def separated_points(rng, width, height, n, min_dist, margin=1.0) -> PointSet:
    """Rejection-sample n points with pairwise separation above min_dist."""
    pts = []
    attempts = 0
    while len(pts) < n:
        attempts += 1
        if attempts > 100000:
            raise RuntimeError("separation too strict for the frame")
        p = rng.uniform([margin, margin], [width - margin, height - margin])
        if all(np.hypot(p[0] - q[0], p[1] - q[1]) > min_dist for q in pts):
            pts.append(p)
    return PointSet(np.array(pts), width, height)


def clustered_scene(rng, width=160, height=160, n_cluster=45, n_background=6,
                    patch=(60, 100), min_dist=4.5, moat=40.0) -> PointSet:
    """A dense patch of separated points plus a far, sparse background.

    Background points keep `moat` pixels of clearance from the patch.  With
    the default label edges the dense mask reaches 16 px beyond a point, so
    a moat > 32 px keeps background label-balls disjoint from the cluster
    component and background points clear of its bbox.
    """
    lo, hi = patch
    pts = []
    attempts = 0
    while len(pts) < n_cluster:
        attempts += 1
        if attempts > 200000:
            raise RuntimeError("cluster too dense for the separation")
        p = rng.uniform([lo, lo], [hi, hi])
        if all(np.hypot(p[0] - q[0], p[1] - q[1]) > min_dist for q in pts):
            pts.append(p)
    placed = 0
    while placed < n_background and attempts < 200000:
        attempts += 1
        p = rng.uniform([2.0, 2.0], [width - 2.0, height - 2.0])
        if lo - moat < p[0] < hi + moat and lo - moat < p[1] < hi + moat:
            continue
        if all(np.hypot(p[0] - q[0], p[1] - q[1]) > min_dist for q in pts):
            pts.append(p)
            placed += 1
    return PointSet(np.array(pts), width, height)
