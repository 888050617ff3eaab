"""Counting and localization evaluation.

Counting: MAE and root-mean-square error over per-image counts, plus the
grid average mean absolute error (GAME) which charges count errors cell
by cell on a 2^n x 2^n partition.

Localization: one-to-one point matching under a distance threshold
(scalar or per-ground-truth-point), greedy or optimal, reported as
precision / recall / F-measure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .closeness import nn_distances
from .core import PointSet


def count_errors(preds, gts) -> tuple[float, float]:
    """Mean absolute error and root-mean-square error of per-image counts."""
    p = np.asarray(preds, dtype=np.float64)
    g = np.asarray(gts, dtype=np.float64)
    if p.shape != g.shape or p.ndim != 1 or p.size == 0:
        raise ValueError("need two equal-length non-empty count lists")
    diff = np.abs(p - g)
    return float(diff.mean()), float(np.sqrt(np.mean(diff * diff)))


@dataclass(frozen=True)
class MatchConfig:
    """sigma: scalar threshold or one threshold per ground-truth point."""

    sigma: float | np.ndarray
    strategy: str = "greedy"

    def __post_init__(self):
        if self.strategy not in ("greedy", "optimal"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        sig = np.atleast_1d(np.asarray(self.sigma, dtype=np.float64))
        if np.any(sig <= 0):
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class MatchResult:
    pairs: list[tuple[int, int, float]]  # (pred index, gt index, distance)
    tp: int
    fp: int
    fn: int


def _sigma_per_gt(cfg: MatchConfig, n_gt: int) -> np.ndarray:
    sig = np.asarray(cfg.sigma, dtype=np.float64)
    if sig.ndim == 0:
        return np.full(n_gt, float(sig))
    if sig.shape != (n_gt,):
        raise ValueError(f"adaptive sigma length {sig.shape} != gt count {n_gt}")
    return sig


def match_points(pred: PointSet, gt: PointSet, cfg: MatchConfig) -> MatchResult:
    """One-to-one matching of predictions to ground truth under sigma.

    greedy: feasible pairs sorted by ascending distance, each accepted iff
    both endpoints are still free.  optimal: maximum-cardinality matching
    with minimum total distance among maximum matchings (Hungarian on a
    padded cost matrix).
    """
    n_p, n_g = len(pred), len(gt)
    sig = _sigma_per_gt(cfg, n_g)
    if n_p == 0 or n_g == 0:
        return MatchResult([], 0, n_p, n_g)

    dx = pred.xy[:, 0][:, None] - gt.xy[:, 0][None, :]
    dy = pred.xy[:, 1][:, None] - gt.xy[:, 1][None, :]
    dist = np.sqrt(dx * dx + dy * dy)
    feasible = dist <= sig[None, :]

    pairs: list[tuple[int, int, float]] = []
    if cfg.strategy == "greedy":
        pi, gi = np.nonzero(feasible)
        order = np.lexsort((gi, pi, dist[pi, gi]))
        p_used = np.zeros(n_p, dtype=bool)
        g_used = np.zeros(n_g, dtype=bool)
        for k in order:
            a, b = pi[k], gi[k]
            if not p_used[a] and not g_used[b]:
                p_used[a] = True
                g_used[b] = True
                pairs.append((int(a), int(b), float(dist[a, b])))
    else:
        # any total below `big` beats one more infeasible cell, so the
        # assignment maximizes feasible pairs first, then total distance
        big = float(dist[feasible].sum()) + 1.0
        cost = np.where(feasible, dist, big)
        rows, cols = linear_sum_assignment(cost)
        for a, b in zip(rows, cols):
            if feasible[a, b]:
                pairs.append((int(a), int(b), float(dist[a, b])))
        pairs.sort()
    tp = len(pairs)
    return MatchResult(pairs, tp, n_p - tp, n_g - tp)


def prf(m: MatchResult) -> tuple[float, float, float]:
    """Precision, recall, F-measure with the 0/0 -> 0 convention."""
    p = m.tp / (m.tp + m.fp) if m.tp + m.fp else 0.0
    r = m.tp / (m.tp + m.fn) if m.tp + m.fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def knn_sigma(gt: PointSet) -> np.ndarray:
    """Per-point matching threshold: distance to the nearest other gt point."""
    return nn_distances(gt)


def game(pred_map: np.ndarray, gt: PointSet, n: int) -> float:
    """Grid average mean absolute error for one image.

    The frame splits into a 2^n x 2^n grid along boundaries floor(W*k/2^n)
    so each level refines the previous one (this keeps GAME monotone in n);
    returns the sum over cells of |predicted mass - gt point count|.
    """
    if n < 0 or n > 5:
        raise ValueError("n must be in [0, 5]")
    h, w = pred_map.shape
    if gt.width != w or gt.height != h:
        raise ValueError("prediction and annotation frame dimensions differ")
    cells = 1 << n
    if cells > w or cells > h:
        raise ValueError(f"grid {cells}x{cells} finer than {w}x{h} pixels")
    bx = (w * np.arange(cells + 1)) // cells
    by = (h * np.arange(cells + 1)) // cells

    pm = pred_map.astype(np.float64)
    total = 0.0
    if len(gt):
        gx = np.searchsorted(bx, gt.xy[:, 0], side="right") - 1
        gy = np.searchsorted(by, gt.xy[:, 1], side="right") - 1
    else:
        gx = gy = np.zeros(0, dtype=np.int64)
    gt_counts = np.zeros((cells, cells), dtype=np.int64)
    np.add.at(gt_counts, (gy, gx), 1)
    for j in range(cells):
        for i in range(cells):
            mass = pm[by[j] : by[j + 1], bx[i] : bx[i + 1]].sum()
            total += abs(mass - gt_counts[j, i])
    return float(total)
