"""Learning-to-scale: center-loss optimization over per-region scale factors.

Given closeness levels S_i of the selected dense regions, the optimizer
finds scale factors r_i (clamped to [r_min, r_max]) and a learnable
center c so that the rescaled levels S_i * r_i**2 cluster around c:

    loss(r, c) = 1/2 * sum_i (S_i * r_i**2 - c)**2

r is updated by projected gradient descent; c follows the usual center
update with learning rate alpha and denominator 1 + M.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class L2SConfig:
    r_min: float = 0.5
    r_max: float = 3.0
    alpha: float = 1e-3  # center learning rate
    eta: float = 1e-3  # scale-factor step size
    update_interval: int = 1  # center updates every this many iterations; 0 = frozen
    max_iters: int = 10000
    tol: float = 1e-9  # stop when |loss change| drops below this

    def __post_init__(self):
        if not (0 < self.r_min < self.r_max):
            raise ValueError("need 0 < r_min < r_max")
        if self.alpha <= 0 or self.eta <= 0:
            raise ValueError("alpha and eta must be positive")
        if self.update_interval < 0 or self.max_iters < 1:
            raise ValueError("bad iteration controls")


@dataclass
class L2SState:
    r: np.ndarray
    center: float
    iters: int
    loss_trace: list[float] = field(default_factory=list)
    center_trace: list[float] = field(default_factory=list)


def center_loss(levels, r, center: float) -> float:
    """1/2 sum of squared deviations of S_i * r_i**2 from the center."""
    s = np.asarray(levels, dtype=np.float64)
    rr = np.asarray(r, dtype=np.float64)
    if s.shape != rr.shape:
        raise ValueError(f"length mismatch: {s.shape} vs {rr.shape}")
    dev = s * rr * rr - center
    return float(0.5 * np.sum(dev * dev))


def grad_r(level: float, r: float, center: float):
    """d loss / d r_i = 2 S_i (S_i r_i^3 - c r_i). Accepts arrays."""
    s = np.asarray(level, dtype=np.float64)
    rr = np.asarray(r, dtype=np.float64)
    out = 2.0 * s * (s * rr**3 - center * rr)
    return float(out) if out.ndim == 0 else out


def update_center(levels, r, center: float, alpha: float) -> float:
    """One center step: c - alpha * sum(c - S_i r_i^2) / (1 + M)."""
    s = np.asarray(levels, dtype=np.float64)
    rr = np.asarray(r, dtype=np.float64)
    m = s.shape[0]
    delta = np.sum(center - s * rr * rr) / (1.0 + m)
    return float(center - alpha * delta)


def fit(levels, cfg: L2SConfig = L2SConfig(), init: L2SState | None = None) -> L2SState:
    """Alternate projected gradient steps on r with periodic center updates.

    Stops when the loss change falls below cfg.tol or after cfg.max_iters
    iterations.  The loss trace starts with the initial loss and gains one
    entry per iteration.
    """
    s = np.asarray(levels, dtype=np.float64)
    if s.ndim != 1 or s.size < 1:
        raise ValueError("need a non-empty 1-d closeness vector")
    if not np.all(np.isfinite(s)) or np.any(s <= 0):
        raise ValueError("closeness levels must be finite and positive")
    if init is not None:
        r = np.asarray(init.r, dtype=np.float64).copy()
        center = float(init.center)
        if r.shape != s.shape:
            raise ValueError("init state length does not match levels")
    else:
        r = np.ones_like(s)
        center = float(s.mean())  # mean of S_i r_i^2 at r = 1
    r = np.clip(r, cfg.r_min, cfg.r_max)

    trace = [center_loss(s, r, center)]
    centers = [center]
    iters = 0
    for iters in range(1, cfg.max_iters + 1):
        r = np.clip(r - cfg.eta * grad_r(s, r, center), cfg.r_min, cfg.r_max)
        if cfg.update_interval and iters % cfg.update_interval == 0:
            center = update_center(s, r, center, cfg.alpha)
        trace.append(center_loss(s, r, center))
        centers.append(center)
        if abs(trace[-1] - trace[-2]) < cfg.tol:
            break
    return L2SState(r=r, center=center, iters=iters, loss_trace=trace,
                    center_trace=centers)
