"""Training objectives as pure numeric functions.

The dynamic cross-entropy weights each pixel's cross-entropy by the
expected absolute class distance plus one, so predictions that put mass
on geometrically distant classes pay more than near misses.  The analytic
gradient treats the probabilities as free variables (no simplex
projection) and differentiates through the weight term.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mapgen import DistanceLabelMap


@dataclass(frozen=True)
class LossConfig:
    lambda1: float = 1.0  # center-loss weight in the regression objective
    lambda2: float = 1.0  # center-loss weight in the localization objective
    prob_floor: float = 1e-12  # keeps log() finite at zero ground-truth probability

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("loss weights must be non-negative")
        if not (0 < self.prob_floor < 1e-3):
            raise ValueError("prob_floor must lie in (0, 1e-3)")


@dataclass(frozen=True)
class ProbabilityVolume:
    """Per-pixel class probabilities, planes shaped (n_classes, h, w)."""

    planes: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.planes)
        if p.ndim != 3:
            raise ValueError("planes must be (n_classes, h, w)")
        object.__setattr__(self, "planes", p)

    @property
    def n_classes(self) -> int:
        return self.planes.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.planes.shape[1:]

    def validate(self, atol: float = 1e-4) -> None:
        p = self.planes
        if np.any(p < 0):
            raise ValueError("negative probability")
        if not np.allclose(p.sum(axis=0), 1.0, atol=atol):
            raise ValueError("per-pixel probabilities do not sum to 1")

    @classmethod
    def one_hot(cls, label_map: DistanceLabelMap) -> "ProbabilityVolume":
        labels = label_map.labels
        n = label_map.config.n_classes
        planes = np.zeros((n, *labels.shape), dtype=np.float32)
        idx = np.arange(n).reshape(-1, 1, 1)
        planes[idx == labels[None]] = 1.0
        return cls(planes)

    def argmax_labels(self, config) -> DistanceLabelMap:
        return DistanceLabelMap(
            np.argmax(self.planes, axis=0).astype(np.uint8), config
        )


def mse_loss(pred: np.ndarray, gt: np.ndarray, mean: bool = False) -> float:
    """Sum (or mean, with mean=True) of squared per-pixel differences."""
    if pred.shape != gt.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {gt.shape}")
    diff = pred.astype(np.float64) - gt.astype(np.float64)
    total = float(np.sum(diff * diff))
    return total / diff.size if mean else total


def _check_dce_inputs(pr: ProbabilityVolume, gt: DistanceLabelMap):
    if pr.shape != gt.labels.shape:
        raise ValueError(f"shape mismatch: {pr.shape} vs {gt.labels.shape}")
    if pr.n_classes != gt.config.n_classes:
        raise ValueError(
            f"class mismatch: {pr.n_classes} planes vs {gt.config.n_classes} classes"
        )


def _dce_terms(pr: ProbabilityVolume, gt: DistanceLabelMap, cfg: LossConfig):
    p = pr.planes.astype(np.float64)
    c = gt.labels.astype(np.int64)[None]
    i = np.arange(pr.n_classes, dtype=np.int64).reshape(-1, 1, 1)
    dist_w = np.abs(c - i) + 1.0  # (n_classes, h, w)
    weight = np.sum(dist_w * p, axis=0)
    q = np.take_along_axis(p, c, axis=0)[0]
    q_floored = np.maximum(q, cfg.prob_floor)
    return p, dist_w, weight, q, q_floored


def dce_loss(
    pr: ProbabilityVolume, gt: DistanceLabelMap, cfg: LossConfig = LossConfig()
) -> float:
    """Distance-weighted cross-entropy, natural log, summed over pixels."""
    _check_dce_inputs(pr, gt)
    _, _, weight, _, q_floored = _dce_terms(pr, gt, cfg)
    return float(-np.sum(weight * np.log(q_floored)))


def dce_grad(
    pr: ProbabilityVolume, gt: DistanceLabelMap, cfg: LossConfig = LossConfig()
) -> np.ndarray:
    """Gradient of dce_loss w.r.t. every class probability, same shape as planes.

    Each pixel's loss is -(weight) * log(q) with weight = sum_i (|c-i|+1) p_i
    and q = max(p_c, floor), so the gradient has a -(|c-i|+1) log(q) term on
    every class plus a -weight/q term on the ground-truth class (zeroed when
    p_c sits below the floor, where log is constant).
    """
    _check_dce_inputs(pr, gt)
    p, dist_w, weight, q, q_floored = _dce_terms(pr, gt, cfg)
    grad = -dist_w * np.log(q_floored)
    c = gt.labels.astype(np.int64)[None]
    i = np.arange(pr.n_classes, dtype=np.int64).reshape(-1, 1, 1)
    gt_plane = (i == c).astype(np.float64)
    grad -= gt_plane * (weight / q_floored) * (q >= cfg.prob_floor)
    return grad


def combined_regression(
    l_m_init: float, l_m_dense: float, l_s: float, cfg: LossConfig = LossConfig()
) -> float:
    """Total regression objective: both map losses plus weighted center loss."""
    return l_m_init + l_m_dense + cfg.lambda1 * l_s


def combined_localization(
    l_ce_init: float, l_ce_dense: float, l_s: float, cfg: LossConfig = LossConfig()
) -> float:
    """Total localization objective: both label losses plus weighted center loss."""
    return l_ce_init + l_ce_dense + cfg.lambda2 * l_s
