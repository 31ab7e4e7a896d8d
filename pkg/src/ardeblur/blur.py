"""Square blurring operators under Zero, Periodic, Reflective and
Anti-Reflective boundary conditions.

Every operator is applied the same way: pad the field of view according to the
boundary condition, then convolve with the mask and keep the valid region,

    g[i] = sum_{s=-q}^{q} h[s] * padded(f)[i - s].

Images are vectorized row-major when an explicit matrix is needed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np
from scipy import signal

from .image import as_image
from .psf import Psf, rotate180

# direct summation only pays off for tiny masks or tiny images
DIRECT_MAX_TAPS = 6
DIRECT_MAX_WORK = 1 << 15
DENSE_CAP = 4096


class BoundaryCondition(str, enum.Enum):
    ZERO = "zero"
    PERIODIC = "periodic"
    REFLECTIVE = "reflective"
    ANTIREFLECTIVE = "antireflective"

    @classmethod
    def parse(cls, value) -> "BoundaryCondition":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        aliases = {"ar": "antireflective", "r": "reflective", "p": "periodic",
                   "z": "zero", "dirichlet": "zero"}
        return cls(aliases.get(key, key))


_NP_PAD = {
    BoundaryCondition.ZERO: dict(mode="constant"),
    BoundaryCondition.PERIODIC: dict(mode="wrap"),
    # f[1-i] = f[i]
    BoundaryCondition.REFLECTIVE: dict(mode="symmetric"),
    # f[1-i] = 2 f[1] - f[1+i]; axis-by-axis padding gives the
    # four-term double anti-reflection at the corners
    BoundaryCondition.ANTIREFLECTIVE: dict(mode="reflect", reflect_type="odd"),
}


class SupportError(ValueError):
    """The PSF support is too large for the boundary condition and size."""


def check_support(q, shape, bc: BoundaryCondition) -> None:
    bc = BoundaryCondition.parse(bc)
    for axis, (qj, nj) in enumerate(zip(q, shape)):
        if bc is BoundaryCondition.ANTIREFLECTIVE and qj > 0 and qj > nj - 2:
            raise SupportError(
                f"anti-reflective BCs need q <= n - 2 on axis {axis} "
                f"(q={qj}, n={nj})"
            )
        if bc is BoundaryCondition.REFLECTIVE and qj > nj:
            raise SupportError(
                f"reflective BCs need q <= n on axis {axis} (q={qj}, n={nj})"
            )


def pad(f, psf: Psf, bc) -> np.ndarray:
    """Extend ``f`` by ``(q1, q2)`` pixels on each side following ``bc``."""
    bc = BoundaryCondition.parse(bc)
    f = as_image(f)
    check_support(psf.q, f.shape, bc)
    q1, q2 = psf.q
    return np.pad(f, ((q1, q1), (q2, q2)), **_NP_PAD[bc])


def _valid_convolve(padded: np.ndarray, taps: np.ndarray) -> np.ndarray:
    n_out = (padded.shape[0] - taps.shape[0] + 1) * (padded.shape[1] - taps.shape[1] + 1)
    if taps.size <= DIRECT_MAX_TAPS or taps.size * n_out <= DIRECT_MAX_WORK:
        return signal.convolve2d(padded, taps, mode="valid")
    return signal.fftconvolve(padded, taps, mode="valid")


@dataclass(frozen=True)
class BlurOperator:
    """The square matrix ``A_n`` for a PSF, a BC and an ``n1 x n2`` field of view."""

    psf: Psf
    bc: BoundaryCondition
    shape: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "bc", BoundaryCondition.parse(self.bc))
        shape = tuple(int(v) for v in self.shape)
        if len(shape) != 2 or min(shape) < 1:
            raise ValueError(f"bad field-of-view shape {self.shape}")
        object.__setattr__(self, "shape", shape)
        check_support(self.psf.q, shape, self.bc)

    @property
    def size(self) -> int:
        return self.shape[0] * self.shape[1]

    def with_psf(self, psf: Psf) -> "BlurOperator":
        return replace(self, psf=psf)

    def reblurred(self) -> "BlurOperator":
        """Operator of the 180-degree rotated PSF (the reblurring matrix ``A'``)."""
        return self.with_psf(rotate180(self.psf))

    def __call__(self, f) -> np.ndarray:
        return apply(self, f)


def apply(op: BlurOperator, f) -> np.ndarray:
    """Blur ``f`` with ``op``: pad by the BC, then valid convolution."""
    f = as_image(f)
    if f.shape != op.shape:
        raise ValueError(f"image shape {f.shape} does not match operator {op.shape}")
    return _valid_convolve(pad(f, op.psf, op.bc), op.psf.taps)


def apply_reblur_adjoint(op: BlurOperator, r) -> np.ndarray:
    """Apply ``A'``, the operator of the rotated PSF with the same BC.

    ``A'`` equals the transpose only for Zero and Periodic BCs.
    """
    return apply(op.reblurred(), r)


def densify(op: BlurOperator, cap: int = DENSE_CAP) -> np.ndarray:
    """Explicit ``N x N`` matrix of ``op`` (column ``j`` is ``apply(op, e_j)``)."""
    n = op.size
    if n > cap:
        raise ValueError(f"densify limited to N <= {cap} (got N = {n})")
    out = np.empty((n, n))
    e = np.zeros(n)
    for j in range(n):
        e[j] = 1.0
        out[:, j] = apply(op, e.reshape(op.shape)).ravel()
        e[j] = 0.0
    return out
