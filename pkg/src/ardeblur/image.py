"""Image containers, noise, restoration metrics and grayscale file I/O.

Images are plain 2-D ``float64`` numpy arrays; :func:`as_image` is the single
validation point.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

#: Identifier of the pseudo-random stream used by :func:`add_noise`.
RNG_ALGORITHM = "numpy.random.PCG64/standard_normal"


class ImageError(ValueError):
    pass


def as_image(x, min_size: int = 1) -> np.ndarray:
    """Return ``x`` as a finite 2-D float64 array with both sides >= ``min_size``."""
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 2:
        raise ImageError(f"image must be 2-D, got shape {a.shape}")
    if min(a.shape) < min_size:
        raise ImageError(f"image sides must be >= {min_size}, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ImageError("image contains non-finite pixels")
    return a


@dataclass(frozen=True)
class NoiseSpec:
    """White Gaussian noise with Frobenius-relative magnitude ``relative_level``."""

    relative_level: float
    seed: int = 0

    def __post_init__(self):
        if self.relative_level < 0:
            raise ValueError("relative_level must be >= 0")


def add_noise(g, spec: NoiseSpec) -> np.ndarray:
    """Add i.i.d. Gaussian noise rescaled so that ``||eta|| = level * ||g||``.

    Rescaling makes the relative level exact instead of nominal. The noise is
    never clipped to an intensity range.
    """
    g = as_image(g)
    if spec.relative_level == 0:
        return g.copy()
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    eta = rng.standard_normal(g.shape)
    eta *= spec.relative_level * np.linalg.norm(g) / np.linalg.norm(eta)
    return g + eta


def rre(x, f_true) -> float:
    """Relative restoration error ``||x - f|| / ||f||`` (Frobenius)."""
    x = np.asarray(x, dtype=float)
    f_true = np.asarray(f_true, dtype=float)
    if x.shape != f_true.shape:
        raise ImageError(f"shape mismatch: {x.shape} vs {f_true.shape}")
    ref = np.linalg.norm(f_true)
    if ref == 0:
        raise ImageError("relative error against an all-zero true image")
    return float(np.linalg.norm(x - f_true) / ref)


# -- PGM ---------------------------------------------------------------------

def _pgm_tokens(data: bytes, count: int):
    """Parse ``count`` whitespace-separated header tokens, skipping comments."""
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ImageError("truncated PGM header")
        tokens.append(data[start:pos])
    return tokens, pos


def read_pgm(path) -> np.ndarray:
    """Read a binary (P5) or plain (P2) PGM file into a float64 array."""
    data = Path(path).read_bytes()
    (magic, w, h, maxval), pos = _pgm_tokens(data, 4)
    w, h, maxval = int(w), int(h), int(maxval)
    if magic == b"P2":
        vals = np.array(data[pos:].split()[: w * h], dtype=np.float64)
        if vals.size != w * h:
            raise ImageError(f"{path}: truncated P2 raster")
        return vals.reshape(h, w)
    if magic != b"P5":
        raise ImageError(f"{path}: not a PGM file (magic {magic!r})")
    pos += 1  # single whitespace byte after maxval
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    raster = np.frombuffer(data, dtype=dtype, count=w * h, offset=pos)
    return raster.reshape(h, w).astype(np.float64)


def write_pgm(path, image, maxval: int = 255) -> None:
    """Write a P5 PGM, clamping to ``[0, maxval]`` and rounding to nearest."""
    if maxval not in (255, 65535):
        raise ImageError("maxval must be 255 or 65535")
    a = np.clip(np.rint(np.asarray(image, dtype=float)), 0, maxval)
    dtype = np.dtype("u1") if maxval == 255 else np.dtype(">u2")
    h, w = a.shape
    header = f"P5\n{w} {h}\n{maxval}\n".encode("ascii")
    Path(path).write_bytes(header + a.astype(dtype).tobytes())


def read_matrix(path) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(path, dtype=np.float64))


def write_matrix(path, a) -> None:
    np.savetxt(path, np.atleast_2d(a), fmt="%.17g")


def load_image(path) -> np.ndarray:
    """Load a PGM or whitespace-separated text matrix, by content."""
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic in (b"P5", b"P2"):
        return read_pgm(path)
    return read_matrix(path)


# -- bundled synthetic scene -------------------------------------------------

def synthetic_scene(shape=(128, 128), margin=(0, 0)) -> np.ndarray:
    """Deterministic piecewise-smooth test scene on ``[0, 255]``.

    The scene is a function of normalized coordinates, so ``margin`` extends
    the same scene beyond the field of view: the returned array has shape
    ``(n1 + 2*m1, n2 + 2*m2)`` and its central ``n1 x n2`` window equals
    ``synthetic_scene(shape)``.  Content (a sloped, shaded background and
    several sharp-edged objects) crosses the field-of-view border on purpose.
    """
    n1, n2 = shape
    m1, m2 = margin
    y = (np.arange(-m1, n1 + m1) + 0.5)[:, None] / n1
    x = (np.arange(-m2, n2 + m2) + 0.5)[None, :] / n2

    img = 40.0 + 90.0 * y + 50.0 * x + 18.0 * np.sin(2.1 * np.pi * x + 1.3 * y)

    # disk overlapping the top border, intensity with a linear shading
    disk = (y - 0.08) ** 2 + (x - 0.3) ** 2 < 0.2**2
    img = np.where(disk, 200.0 - 80.0 * (x - 0.1), img)

    # dark rectangle crossing the right border
    rect = (np.abs(y - 0.55) < 0.12) & (x > 0.72) & (x < 1.15)
    img = np.where(rect, 25.0 + 30.0 * y, img)

    # bright triangle in the lower-left area
    tri = (y > 0.62) & (y < 0.95) & (x > 0.08) & (x - 0.08 < 0.9 * (y - 0.62))
    img = np.where(tri, 235.0, img)

    # ring in the middle
    r = np.hypot(y - 0.45, x - 0.5)
    ring = (r > 0.1) & (r < 0.16)
    img = np.where(ring, 150.0 + 60.0 * np.cos(8.0 * np.arctan2(y - 0.45, x - 0.5)), img)

    # thin bars crossing the bottom border
    bars = (y > 0.88) & (np.floor(x * 16) % 2 == 0) & (x > 0.45)
    img = np.where(bars, img + 45.0, img)

    return np.clip(img, 0.0, 255.0)
