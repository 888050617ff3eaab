"""File formats: point CSV, CRMP binary rasters, PGM label export.

CRMP layout (little-endian):
    magic   4 bytes  b"CRMP"
    version u8       1
    dtype   u8       0 = float32, 1 = uint8, 2 = float32 probability stack
    classes u8       only present for dtype 2
    width   u32
    height  u32
    payload row-major values (dtype 2: classes consecutive planes)

Point CSV: one "x,y" pair per line; leading comment lines start with '#'
and may carry "key=value" metadata, in particular "# width=W height=H".
"""

from __future__ import annotations

import struct

import numpy as np

from .core import PointSet

MAGIC = b"CRMP"
VERSION = 1
DTYPE_F32 = 0
DTYPE_U8 = 1
DTYPE_STACK = 2


def write_points(path, points: PointSet, extra_comments: dict | None = None) -> None:
    lines = [f"# width={points.width} height={points.height}"]
    if extra_comments:
        lines.append("# " + " ".join(f"{k}={v}" for k, v in extra_comments.items()))
    for x, y in points.xy:
        lines.append(f"{float(x)!r},{float(y)!r}")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def read_points(path, width: int | None = None, height: int | None = None) -> PointSet:
    xs, ys = [], []
    meta = {}
    with open(path) as f:
        for raw in f:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                for token in line[1:].split():
                    if "=" in token:
                        k, v = token.split("=", 1)
                        meta[k] = v
                continue
            sx, sy = line.split(",")
            xs.append(float(sx))
            ys.append(float(sy))
    if width is None:
        width = int(meta["width"]) if "width" in meta else None
    if height is None:
        height = int(meta["height"]) if "height" in meta else None
    if width is None or height is None:
        raise ValueError(
            f"{path}: frame dimensions missing; add a '# width=W height=H' "
            "header or pass them explicitly"
        )
    return PointSet(np.column_stack([xs, ys]) if xs else np.empty((0, 2)), width, height)


def write_raster(path, raster: np.ndarray) -> None:
    if raster.dtype == np.float32:
        dtype = DTYPE_F32
    elif raster.dtype == np.uint8:
        dtype = DTYPE_U8
    else:
        raise ValueError(f"unsupported raster dtype {raster.dtype}")
    h, w = raster.shape
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<BBII", VERSION, dtype, w, h))
        f.write(np.ascontiguousarray(raster).tobytes())


def write_probability_stack(path, planes: np.ndarray) -> None:
    """planes: (n_classes, h, w) float32."""
    n, h, w = planes.shape
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<BBBII", VERSION, DTYPE_STACK, n, w, h))
        f.write(np.ascontiguousarray(planes, dtype=np.float32).tobytes())


def read_raster(path) -> np.ndarray:
    """Read a CRMP file; dtype 2 files come back as (n_classes, h, w)."""
    with open(path, "rb") as f:
        data = f.read()
    if data[:4] != MAGIC:
        raise ValueError(f"{path}: not a CRMP raster (bad magic)")
    version, dtype = struct.unpack_from("<BB", data, 4)
    if version != VERSION:
        raise ValueError(f"{path}: unsupported CRMP version {version}")
    off = 6
    n_classes = 1
    if dtype == DTYPE_STACK:
        (n_classes,) = struct.unpack_from("<B", data, off)
        off += 1
    w, h = struct.unpack_from("<II", data, off)
    off += 8
    if dtype == DTYPE_U8:
        arr = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=off)
        return arr.reshape(h, w).copy()
    count = w * h * n_classes
    arr = np.frombuffer(data, dtype="<f4", count=count, offset=off)
    if dtype == DTYPE_STACK:
        return arr.reshape(n_classes, h, w).copy()
    return arr.reshape(h, w).copy()


def write_pgm(path, labels: np.ndarray, n_classes: int) -> None:
    """Export a label map as binary PGM, stretching classes over 0..255."""
    if n_classes < 2:
        raise ValueError("need at least 2 classes for PGM export")
    step = 255 // (n_classes - 1)
    gray = (labels.astype(np.uint16) * step).clip(0, 255).astype(np.uint8)
    h, w = labels.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode())
        f.write(gray.tobytes())
