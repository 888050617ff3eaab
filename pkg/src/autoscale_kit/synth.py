"""Seeded synthetic crowd scenes for property tests and tail experiments.

All randomness comes from numpy's PCG64 generator seeded explicitly, so
identical specs reproduce identical scenes bit for bit.  Two point
processes are available: homogeneous Poisson, and Thomas clusters
(Poisson parents, Poisson-many Gaussian-spread offspring; offspring
falling outside the frame are rejected, not wrapped).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BBox, PointSet

RNG_ALGORITHM = "pcg64"


@dataclass(frozen=True)
class PoissonProcess:
    intensity: float  # expected points per px^2

    def __post_init__(self):
        if self.intensity < 0:
            raise ValueError("intensity must be >= 0")


@dataclass(frozen=True)
class ThomasProcess:
    parent_intensity: float  # expected parents per px^2
    mean_offspring: float  # Poisson mean per parent
    spread: float  # isotropic Gaussian offspring spread, px

    def __post_init__(self):
        if self.parent_intensity < 0 or self.mean_offspring < 0:
            raise ValueError("intensities must be >= 0")
        if self.spread <= 0:
            raise ValueError("spread must be > 0")


@dataclass(frozen=True)
class SceneSpec:
    width: int
    height: int
    process: PoissonProcess | ThomasProcess
    seed: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("frame dimensions must be >= 1")


def _poisson_points(rng, intensity, width, height) -> np.ndarray:
    n = rng.poisson(intensity * width * height)
    return rng.uniform([0.0, 0.0], [width, height], size=(n, 2))


def generate(spec: SceneSpec) -> PointSet:
    """Draw one scene; deterministic for a given spec."""
    rng = np.random.default_rng(spec.seed)
    w, h = spec.width, spec.height
    proc = spec.process
    if isinstance(proc, PoissonProcess):
        xy = _poisson_points(rng, proc.intensity, w, h)
    else:
        parents = _poisson_points(rng, proc.parent_intensity, w, h)
        broods = []
        for px, py in parents:
            k = rng.poisson(proc.mean_offspring)
            off = rng.normal([px, py], proc.spread, size=(k, 2))
            keep = (off[:, 0] >= 0) & (off[:, 0] < w) & (off[:, 1] >= 0) & (off[:, 1] < h)
            broods.append(off[keep])
        xy = np.concatenate(broods) if broods else np.empty((0, 2))
    return PointSet(xy, w, h)


def dense_sparse_composite(
    sparse_spec: SceneSpec, dense_spec: SceneSpec, dense_bbox: BBox
) -> PointSet:
    """A sparse background scene plus a dense scene confined to a box.

    The dense spec's frame must match the box dimensions; its points are
    translated to the box origin inside the sparse frame.
    """
    if (dense_spec.width, dense_spec.height) != (dense_bbox.width, dense_bbox.height):
        raise ValueError(
            f"dense spec {dense_spec.width}x{dense_spec.height} does not match "
            f"bbox {dense_bbox.width}x{dense_bbox.height}"
        )
    if dense_bbox.x1 > sparse_spec.width or dense_bbox.y1 > sparse_spec.height:
        raise ValueError("dense bbox exceeds the sparse frame")
    background = generate(sparse_spec)
    cluster = generate(dense_spec)
    shifted = cluster.xy + [dense_bbox.x0, dense_bbox.y0]
    xy = np.concatenate([background.xy, shifted])
    return PointSet(xy, sparse_spec.width, sparse_spec.height)
