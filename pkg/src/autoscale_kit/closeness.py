"""Nearest-neighbor statistics and the closeness level of a region.

The closeness level is the mean distance from each person to their
nearest neighbor within the same region; it is the quantity the
learning-to-scale optimizer normalizes across dense regions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .core import PointSet

log = logging.getLogger(__name__)

# brute force is the reference; the KD-tree path recomputes distances
# from neighbor indices with the same formula so results stay identical
BRUTE_FORCE_LIMIT = 2000


def nn_distances(points: PointSet) -> np.ndarray:
    """Distance from each point to its nearest other point, in point order."""
    n = len(points)
    if n < 2:
        raise ValueError("nearest-neighbor distances need at least 2 points")
    xy = points.xy
    if n <= BRUTE_FORCE_LIMIT:
        dx = xy[:, 0][:, None] - xy[:, 0][None, :]
        dy = xy[:, 1][:, None] - xy[:, 1][None, :]
        d = np.sqrt(dx * dx + dy * dy)
        np.fill_diagonal(d, np.inf)
        out = d.min(axis=1)
    else:
        _, idx = cKDTree(xy).query(xy, k=2)
        nb = xy[idx[:, 1]]
        out = np.sqrt((xy[:, 0] - nb[:, 0]) ** 2 + (xy[:, 1] - nb[:, 1]) ** 2)
    if np.any(out == 0):
        log.warning("duplicate points present: zero nearest-neighbor distance")
    return out


def closeness_level(points: PointSet) -> float:
    """Mean nearest-neighbor distance over the point set."""
    return float(np.mean(nn_distances(points)))


@dataclass(frozen=True)
class ClosenessStats:
    level: float
    nn: np.ndarray
    count: int

    @classmethod
    def from_points(cls, points: PointSet) -> "ClosenessStats":
        nn = nn_distances(points)
        return cls(float(nn.mean()), nn, len(points))

    @property
    def has_duplicates(self) -> bool:
        return bool(np.any(self.nn == 0))
