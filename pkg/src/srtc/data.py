"""Synthetic scenes, missing-pixel masks and file I/O.

Tensor files use the little-endian ``SRT1`` container::

    b"SRT1" | uint32 H | uint32 W | uint32 T | H*W*T float64 values

with values in column-major order (first index fastest). Masks use the same
container holding 0.0/1.0 values.
"""

import os
import struct
from dataclasses import dataclass, field

import numpy as np

from .tensor import unvec, vec

MAGIC = b"SRT1"
HEADER = struct.Struct("<4sIII")
MAX_ELEMENTS = 2**31


class SRT1Error(ValueError):
    """Malformed SRT1 file."""


class BadMagicError(SRT1Error):
    pass


class TruncatedFileError(SRT1Error):
    pass


class DimensionError(SRT1Error):
    pass


@dataclass(frozen=True)
class Blob:
    """A moving foreground object with constant intensity inside its support.

    `position` is the top-left corner (rectangle) or the center (disc) in
    frame 0, as ``(row, col)``; `velocity` is in pixels per frame.
    """

    shape: str = "rectangle"
    size: tuple = (6, 6)
    intensity: float = 100.0
    velocity: tuple = (0.0, 1.0)
    position: tuple = (0.0, 0.0)

    def support(self, dims, t):
        h, w = dims
        rows = np.arange(h)[:, None] + 0.5
        cols = np.arange(w)[None, :] + 0.5
        r0 = self.position[0] + self.velocity[0] * t
        c0 = self.position[1] + self.velocity[1] * t
        if self.shape == "rectangle":
            return (
                (rows >= r0) & (rows < r0 + self.size[0])
                & (cols >= c0) & (cols < c0 + self.size[1])
            )
        if self.shape == "disc":
            radius = self.size[0] / 2.0
            return (rows - r0) ** 2 + (cols - c0) ** 2 <= radius**2
        raise ValueError(f"unknown blob shape {self.shape!r}")


@dataclass(frozen=True)
class SceneSpec:
    dims: tuple = (48, 48, 24)
    background_rank: tuple = (2, 2, 1)
    blobs: tuple = field(default_factory=tuple)
    noise_sigma: float = 0.0
    seed: int = 0
    background_range: tuple = (40.0, 140.0)

    def validate(self):
        if len(self.dims) != 3 or min(self.dims) < 1:
            raise ValueError(f"invalid dims {self.dims}")
        for r, d in zip(self.background_rank, self.dims):
            if not 1 <= r <= d:
                raise ValueError(f"background rank {self.background_rank} invalid for dims {self.dims}")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")
        lo, hi = self.background_range
        if not 0 <= lo < hi <= 255:
            raise ValueError(f"background_range {self.background_range} must lie in [0, 255]")
        h, w, t = self.dims
        for blob in self.blobs:
            if not 0 <= blob.intensity <= 255:
                raise ValueError(f"blob intensity {blob.intensity} outside [0, 255]")
            for k in range(t):
                if not blob.support((h, w), k).any():
                    raise ValueError(f"blob {blob} leaves the frame at t={k}")


def _smooth_basis(size, rank, rng):
    """Orthonormal basis whose first column is constant, the rest smooth."""
    grid = (np.arange(size) + 0.5) / size
    cols = [np.ones(size)]
    for j in range(1, rank):
        phase = rng.uniform(0, 2 * np.pi)
        cols.append(np.cos(np.pi * j * grid + phase) + 0.1 * rng.standard_normal(size))
    q, r = np.linalg.qr(np.column_stack(cols))
    return q * np.sign(np.diag(r))


def synth_background(spec):
    """Exact low-multilinear-rank background scaled into `spec.background_range`."""
    rng = np.random.default_rng([spec.seed, 1])
    factors = [_smooth_basis(d, r, rng) for d, r in zip(spec.dims, spec.background_rank)]
    # 1/f-like decay so high-rank backgrounds have a natural-image spectrum
    idx = np.indices(spec.background_rank).sum(axis=0)
    core = rng.standard_normal(spec.background_rank) / (1.0 + idx)
    bg = np.einsum("abc,ia,jb,kc->ijk", core, *factors)
    # affine rescaling stays in the factor span because each basis contains constants
    lo, hi = spec.background_range
    span = bg.max() - bg.min()
    if span > 1e-9 * max(1.0, np.abs(bg).max()):
        bg = lo + (hi - lo) * (bg - bg.min()) / span
    else:
        bg = np.full(spec.dims, 0.5 * (lo + hi))
    return bg


def synth_scene(spec):
    """Generate ``(video, background, foreground_mask)`` for a scene spec."""
    spec.validate()
    h, w, t = spec.dims
    bg = synth_background(spec)
    fg = np.zeros(spec.dims)
    fg_mask = np.zeros(spec.dims, dtype=bool)
    for blob in spec.blobs:
        for k in range(t):
            sup = blob.support((h, w), k)
            fg[:, :, k][sup] = blob.intensity
            fg_mask[:, :, k] |= sup
    video = bg + fg
    if spec.noise_sigma > 0:
        rng = np.random.default_rng([spec.seed, 2])
        video = video + spec.noise_sigma * rng.standard_normal(spec.dims)
    video = np.clip(video, 0.0, 255.0)
    return video, bg, fg_mask


def apply_missing(x, ratio, seed=0):
    """Hide ``round(ratio * x.size)`` uniformly chosen entries.

    Returns ``(observed, mask)``: unobserved entries of `observed` are zero
    and `mask` is True where the entry is observed.
    """
    if not 0 <= ratio < 1:
        raise ValueError(f"missing ratio must lie in [0, 1), got {ratio}")
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    n_missing = int(np.floor(ratio * n + 0.5))
    rng = np.random.default_rng(seed)
    flat = np.ones(n, dtype=bool)
    flat[rng.choice(n, size=n_missing, replace=False)] = False
    mask = unvec(flat, x.shape)
    return np.where(mask, x, 0.0), mask


def write_tensor(path, x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3:
        raise ValueError(f"expected an order-3 tensor, got shape {x.shape}")
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, *x.shape))
        fh.write(vec(x).astype("<f8").tobytes())


def read_tensor(path):
    """Read an SRT1 file; the whole file is validated before returning."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < HEADER.size:
        if not MAGIC.startswith(raw[:4]):
            raise BadMagicError(f"{path}: not an SRT1 file")
        raise TruncatedFileError(f"{path}: header truncated ({len(raw)} bytes)")
    magic, h, w, t = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise BadMagicError(f"{path}: bad magic {magic!r}")
    if min(h, w, t) < 1:
        raise DimensionError(f"{path}: zero dimension in {(h, w, t)}")
    count = h * w * t
    if count > MAX_ELEMENTS:
        raise DimensionError(f"{path}: dims {(h, w, t)} exceed {MAX_ELEMENTS} elements")
    expected = HEADER.size + 8 * count
    if len(raw) < expected:
        raise TruncatedFileError(f"{path}: expected {expected} bytes, found {len(raw)}")
    if len(raw) > expected:
        raise SRT1Error(f"{path}: {len(raw) - expected} trailing bytes")
    data = np.frombuffer(raw, dtype="<f8", count=count, offset=HEADER.size)
    x = unvec(data.astype(np.float64), (h, w, t))
    if not np.all(np.isfinite(x)):
        raise SRT1Error(f"{path}: non-finite values")
    return x


def write_mask(path, mask):
    write_tensor(path, np.asarray(mask, dtype=bool).astype(np.float64))


def read_mask(path):
    x = read_tensor(path)
    if not np.all((x == 0.0) | (x == 1.0)):
        raise SRT1Error(f"{path}: mask values must be 0 or 1")
    return x == 1.0


def to_bytes_image(frame):
    return np.clip(np.rint(frame), 0, 255).astype(np.uint8)


def write_pgm(path, frame):
    img = to_bytes_image(frame)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(img).tobytes())


def read_pgm(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    parts = raw.split(maxsplit=4)
    if parts[0] != b"P5" or parts[3] != b"255":
        raise ValueError(f"{path}: unsupported PGM")
    w, h = int(parts[1]), int(parts[2])
    payload = raw[len(raw) - w * h:]
    return np.frombuffer(payload, dtype=np.uint8).reshape(h, w)


def export_frames(x, directory):
    """Write one binary PGM per frame as ``frame_%04d.pgm``; returns the paths."""
    x = np.asarray(x)
    os.makedirs(directory, exist_ok=True)
    paths = []
    for k in range(x.shape[2]):
        path = os.path.join(directory, f"frame_{k:04d}.pgm")
        write_pgm(path, x[:, :, k])
        paths.append(path)
    return paths
