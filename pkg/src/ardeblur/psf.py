"""Point spread function masks.

A :class:`Psf` stores a compactly supported blur mask ``h[i1, i2]`` for
``i1 in [-q1, q1]`` and ``i2 in [-q2, q2]``.  Storage is center-origin: the
tap ``h[0, 0]`` lives at array position ``(q1, q2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

SUM_TOL = 1e-12
RENORMALIZE_LIMIT = 0.01
SYMMETRY_TOL = 1e-12


class PsfError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Psf:
    """Nonnegative, unit-mass blur mask with odd dimensions.

    Parameters
    ----------
    taps : array_like
        ``(2*q1 + 1, 2*q2 + 1)`` array, ``taps[q1 + i1, q2 + i2] = h[i1, i2]``.
    """

    taps: np.ndarray

    def __post_init__(self):
        taps = np.array(self.taps, dtype=np.float64)
        if taps.ndim == 1:
            taps = taps[None, :]
        if taps.ndim != 2:
            raise PsfError(f"PSF mask must be 2-D, got shape {taps.shape}")
        if taps.shape[0] % 2 == 0 or taps.shape[1] % 2 == 0:
            raise PsfError(f"PSF mask needs odd dimensions, got {taps.shape}")
        if not np.all(np.isfinite(taps)):
            raise PsfError("PSF mask has non-finite taps")
        if np.any(taps < 0):
            raise PsfError("PSF taps must be nonnegative")
        total = taps.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise PsfError(f"PSF taps must sum to 1 (got {total!r})")
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)

    @property
    def q(self) -> tuple[int, int]:
        return self.taps.shape[0] // 2, self.taps.shape[1] // 2

    @property
    def shape(self) -> tuple[int, int]:
        return self.taps.shape

    def tap(self, i1: int, i2: int) -> float:
        """Return ``h[i1, i2]`` (zero outside the support)."""
        q1, q2 = self.q
        if abs(i1) > q1 or abs(i2) > q2:
            return 0.0
        return float(self.taps[q1 + i1, q2 + i2])

    @classmethod
    def delta(cls, q1: int = 0, q2: int = 0) -> "Psf":
        taps = np.zeros((2 * q1 + 1, 2 * q2 + 1))
        taps[q1, q2] = 1.0
        return cls(taps)

    @classmethod
    def from_array(cls, array, renormalize: bool = True) -> "Psf":
        """Build a mask from raw data, fixing small normalization drift.

        Masks whose sum is off by more than ``SUM_TOL`` but less than 1% are
        rescaled to unit mass; anything further off is rejected.
        """
        taps = np.array(array, dtype=np.float64)
        total = taps.sum()
        if renormalize and abs(total - 1.0) > SUM_TOL:
            if abs(total - 1.0) >= RENORMALIZE_LIMIT:
                raise PsfError(
                    f"PSF sum {total!r} deviates from 1 by 1% or more; "
                    "refusing to renormalize"
                )
            taps = taps / total
        return cls(taps)

    def __repr__(self):
        return f"Psf(q={self.q}, taps=\n{self.taps!r})"


@dataclass(frozen=True)
class SymmetryReport:
    is_strongly_symmetric: bool
    max_asymmetry: float


def symmetry_report(p: Psf, tol: float = SYMMETRY_TOL) -> SymmetryReport:
    """Check ``h[i1, i2] == h[|i1|, |i2|]`` over the whole mask."""
    t = p.taps
    dev = max(
        np.abs(t - t[::-1, :]).max(),
        np.abs(t - t[:, ::-1]).max(),
    )
    return SymmetryReport(bool(dev <= tol), float(dev))


def is_strongly_symmetric(p: Psf, tol: float = SYMMETRY_TOL) -> bool:
    return symmetry_report(p, tol).is_strongly_symmetric


def require_strong_symmetry(p: Psf, tol: float = SYMMETRY_TOL) -> None:
    report = symmetry_report(p, tol)
    if not report.is_strongly_symmetric:
        raise PsfError(
            "operation requires a strongly symmetric PSF "
            f"(max asymmetry {report.max_asymmetry:.3e} > {tol:.1e}); "
            "symmetrize() it first"
        )


def symmetrize(p: Psf) -> Psf:
    """Average the mask over its four axis flips.

    The result satisfies ``s[+-i1, +-i2] = (h[-i1,-i2] + h[-i1,i2] +
    h[i1,-i2] + h[i1,i2]) / 4`` and is strongly symmetric.
    """
    t = p.taps
    # pairing keeps symmetric inputs exact: (2a + 2a) / 4 == a
    s = ((t + t[::-1, :]) + (t[:, ::-1] + t[::-1, ::-1])) / 4.0
    return Psf(s)


def rotate180(p: Psf) -> Psf:
    """Return the mask ``h'[i1, i2] = h[-i1, -i2]``."""
    return Psf(p.taps[::-1, ::-1])


def _offsets(q: int) -> np.ndarray:
    return np.arange(-q, q + 1)


def symbol_real(p: Psf, x1, x2, tol: float = SYMMETRY_TOL):
    """Evaluate the cosine generating function of a strongly symmetric mask.

    ``f(x1, x2) = h00 + 2 sum h[s1,0] cos(s1 x1) + 2 sum h[0,s2] cos(s2 x2)
    + 4 sum sum h[s1,s2] cos(s1 x1) cos(s2 x2)``.  ``x1`` and ``x2`` are
    broadcast against each other.
    """
    require_strong_symmetry(p, tol)
    q1, q2 = p.q
    x1, x2 = np.broadcast_arrays(np.asarray(x1, float), np.asarray(x2, float))
    quad = p.taps[q1:, q2:]
    w1 = np.where(np.arange(q1 + 1) == 0, 1.0, 2.0)
    w2 = np.where(np.arange(q2 + 1) == 0, 1.0, 2.0)
    c1 = np.cos(x1[..., None] * np.arange(q1 + 1)) * w1
    c2 = np.cos(x2[..., None] * np.arange(q2 + 1)) * w2
    out = np.einsum("...a,ab,...b->...", c1, quad, c2)
    return out[()] if out.ndim == 0 else out


def symbol_grid(p: Psf, x1, x2, tol: float = SYMMETRY_TOL) -> np.ndarray:
    """``symbol_real`` on the tensor grid ``x1 x x2`` (shape ``(len(x1), len(x2))``)."""
    require_strong_symmetry(p, tol)
    q1, q2 = p.q
    quad = p.taps[q1:, q2:]
    w1 = np.where(np.arange(q1 + 1) == 0, 1.0, 2.0)
    w2 = np.where(np.arange(q2 + 1) == 0, 1.0, 2.0)
    c1 = np.cos(np.outer(x1, np.arange(q1 + 1))) * w1
    c2 = np.cos(np.outer(x2, np.arange(q2 + 1))) * w2
    return c1 @ quad @ c2.T


def symbol_complex(p: Psf, x1, x2):
    """``sum_s h[s] exp(-i (s1 x1 + s2 x2))`` for any mask."""
    q1, q2 = p.q
    x1, x2 = np.broadcast_arrays(np.asarray(x1, float), np.asarray(x2, float))
    e1 = np.exp(-1j * x1[..., None] * _offsets(q1))
    e2 = np.exp(-1j * x2[..., None] * _offsets(q2))
    out = np.einsum("...a,ab,...b->...", e1, p.taps, e2)
    return out[()] if out.ndim == 0 else out


def gaussian_portion(sigma, q, offset=(0.0, 0.0)) -> Psf:
    """Sample a Gaussian on the ``(2q1+1) x (2q2+1)`` grid and normalize.

    Shifting the Gaussian center by ``offset`` (in pixels) yields slightly
    (small offset) or highly (large offset) non-symmetric masks.
    """
    s1, s2 = np.broadcast_to(np.asarray(sigma, float), (2,))
    q1, q2 = np.broadcast_to(np.asarray(q, int), (2,))
    d1, d2 = offset
    i1 = _offsets(int(q1))[:, None]
    i2 = _offsets(int(q2))[None, :]
    g = np.exp(-0.5 * (((i1 - d1) / s1) ** 2 + ((i2 - d2) / s2) ** 2))
    return Psf(g / g.sum())


def random_psf(rng: np.random.Generator, q, symmetric: bool = False) -> Psf:
    """Random nonnegative unit-mass mask, mostly useful in tests and demos."""
    q1, q2 = q
    taps = rng.random((2 * q1 + 1, 2 * q2 + 1))
    p = Psf(taps / taps.sum())
    return symmetrize(p) if symmetric else p


# -- file interchange -------------------------------------------------------

def read_psf_text(path) -> Psf:
    """Read the ``q1 q2`` header + ``2q1+1`` rows format."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise PsfError(f"{path}: empty PSF file")
    try:
        q1, q2 = (int(v) for v in lines[0].split())
    except ValueError as exc:
        raise PsfError(f"{path}: bad header {lines[0]!r}") from exc
    rows = [[float(v) for v in ln.split()] for ln in lines[1:]]
    taps = np.array(rows, dtype=float)
    if taps.shape != (2 * q1 + 1, 2 * q2 + 1):
        raise PsfError(
            f"{path}: expected {(2 * q1 + 1, 2 * q2 + 1)} taps, got {taps.shape}"
        )
    return Psf.from_array(taps)


def write_psf_text(path, p: Psf) -> None:
    q1, q2 = p.q
    body = "\n".join(" ".join(repr(float(v)) for v in row) for row in p.taps)
    Path(path).write_text(f"{q1} {q2}\n{body}\n")


def load_psf(path) -> Psf:
    """Load a PSF from the text format or from a grayscale PGM image.

    PGM intensities carry no absolute scale, so PGM masks are always divided
    by their sum.
    """
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic in (b"P5", b"P2"):
        from .image import read_pgm

        taps = read_pgm(path)
        if taps.sum() <= 0:
            raise PsfError(f"{path}: PGM mask is all zero")
        return Psf(taps / taps.sum())
    return read_psf_text(path)
