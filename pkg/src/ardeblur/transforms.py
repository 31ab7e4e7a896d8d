"""Fast orthogonal and anti-reflective transforms, 1-D kernels and 2-D
tensor products.

Matrices (1-based ``s, t``):

* cosine  ``R_m[s, t] = sqrt((2 - delta_{s,1}) / m) cos((s-1)(t-1/2) pi / m)``
* sine    ``Q_m[s, t] = sqrt(2 / (m+1)) sin(s t pi / (m+1))`` (symmetric, ``Q^2 = I``)
* anti-reflective ``T_m`` and its inverse, built from ``Q_{m-2}`` plus a
  rank-two border correction.

``R_m`` and ``Q_m`` are evaluated with the orthonormal DCT-II / DST-I of
:mod:`scipy.fft`.  The 2-D transform of a row-major image is ``K1 X K2^T``,
i.e. the Kronecker product ``K1 (x) K2`` acting on ``vec(X)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft as sfft


class TransformKind(str, enum.Enum):
    DFT = "dft"
    COSINE3 = "cosine3"
    SINE1 = "sine1"
    ANTIREFLECTIVE = "antireflective"
    ANTIREFLECTIVE_INVERSE = "antireflective_inverse"


def cosine3_forward(v, axis: int = -1) -> np.ndarray:
    """``R_m v`` along ``axis``."""
    return sfft.dct(np.asarray(v, dtype=float), type=2, norm="ortho", axis=axis)


def cosine3_inverse(v, axis: int = -1) -> np.ndarray:
    """``R_m^T v`` along ``axis``."""
    return sfft.idct(np.asarray(v, dtype=float), type=2, norm="ortho", axis=axis)


def sine1_forward(v, axis: int = -1) -> np.ndarray:
    """``Q_m v`` along ``axis``; its own inverse."""
    return sfft.dst(np.asarray(v, dtype=float), type=1, norm="ortho", axis=axis)


def dft_forward(v, axis: int = -1) -> np.ndarray:
    """Unitary DFT, ``F[s, t] = exp(-2 pi i s t / m) / sqrt(m)`` (0-based)."""
    return sfft.fft(v, norm="ortho", axis=axis)


def dft_inverse(v, axis: int = -1) -> np.ndarray:
    return sfft.ifft(v, norm="ortho", axis=axis)


@dataclass(frozen=True, eq=False)
class ArTransform1D:
    """The pair ``T_m``, ``T~_m = T_m^{-1}`` of the 1-D anti-reflective algebra.

    ``p[j] = 1 - j / (m - 1)`` for ``j = 1..m-2`` and ``alpha`` is the
    positive norm of ``(1, p_1, ..., p_{m-2}, 0)``, which makes the first and
    last columns of ``T_m`` unit vectors.
    """

    m: int
    alpha: float
    p: np.ndarray

    @classmethod
    def of_size(cls, m: int) -> "ArTransform1D":
        return _ar_plan(int(m))

    def forward(self, v, axis: int = -1) -> np.ndarray:
        """``T_m v``: sine transform of the interior plus border terms."""
        v = np.moveaxis(np.asarray(v, dtype=float), axis, -1)
        self._check(v)
        first, last = v[..., :1], v[..., -1:]
        out = np.empty_like(v)
        out[..., 1:-1] = sine1_forward(v[..., 1:-1]) + (
            first * self.p + last * self.p[::-1]
        ) / self.alpha
        out[..., :1] = first / self.alpha
        out[..., -1:] = last / self.alpha
        return np.moveaxis(out, -1, axis)

    def inverse(self, v, axis: int = -1) -> np.ndarray:
        """``T~_m v = (alpha v_1, Q (v_int - v_1 p - v_m Jp), alpha v_m)``."""
        v = np.moveaxis(np.asarray(v, dtype=float), axis, -1)
        self._check(v)
        first, last = v[..., :1], v[..., -1:]
        out = np.empty_like(v)
        out[..., 1:-1] = sine1_forward(v[..., 1:-1] - first * self.p - last * self.p[::-1])
        out[..., :1] = self.alpha * first
        out[..., -1:] = self.alpha * last
        return np.moveaxis(out, -1, axis)

    def matrix(self) -> np.ndarray:
        return self.forward(np.eye(self.m), axis=0)

    def inverse_matrix(self) -> np.ndarray:
        return self.inverse(np.eye(self.m), axis=0)

    def _check(self, v):
        if v.shape[-1] != self.m:
            raise ValueError(f"expected length {self.m}, got {v.shape[-1]}")


@lru_cache(maxsize=64)
def _ar_plan(m: int) -> ArTransform1D:
    if m < 3:
        raise ValueError(f"anti-reflective transform needs m >= 3 (got {m})")
    p = 1.0 - np.arange(1, m - 1) / (m - 1)
    p.setflags(write=False)
    alpha = float(np.sqrt(1.0 + p @ p))
    return ArTransform1D(m, alpha, p)


def ar_forward(v, axis: int = -1) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return ArTransform1D.of_size(v.shape[axis]).forward(v, axis)


def ar_inverse(v, axis: int = -1) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return ArTransform1D.of_size(v.shape[axis]).inverse(v, axis)


_KERNELS = {
    TransformKind.DFT: (dft_forward, dft_inverse),
    TransformKind.COSINE3: (cosine3_forward, cosine3_inverse),
    TransformKind.SINE1: (sine1_forward, sine1_forward),
    TransformKind.ANTIREFLECTIVE: (ar_forward, ar_inverse),
    TransformKind.ANTIREFLECTIVE_INVERSE: (ar_inverse, ar_forward),
}


def tensor_apply(kind, x, inverse: bool = False) -> np.ndarray:
    """Apply the 2-D (Kronecker) transform of ``kind`` to an image.

    The 1-D kernel runs down every column first, then along every row.
    """
    kind = TransformKind(kind)
    x = np.asarray(x)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {x.shape}")
    if kind in (TransformKind.ANTIREFLECTIVE, TransformKind.ANTIREFLECTIVE_INVERSE):
        if min(x.shape) < 3:
            raise ValueError(f"anti-reflective transforms need both sides >= 3, got {x.shape}")
    kernel = _KERNELS[kind][1 if inverse else 0]
    return kernel(kernel(x, axis=0), axis=1)

