"""Eigenvalue grids and fast diagonalized application for the circulant,
cosine (DCT-III), tau (DST-I) and anti-reflective matrix algebras.

Eigenvalues are stored as an ``n1 x n2`` array, in the column order of the
diagonalizing transform on each axis:

=================  ===============================================  ============================
algebra            grid per axis (length ``m``)                     ``A x``
=================  ===============================================  ============================
circulant          ``2 pi r / m``, ``r = 0..m-1`` (complex values)  ``F^H diag F x``
cosine             ``(r-1) pi / m``, ``r = 1..m``                   ``R^T diag R x``
tau                ``r pi / (m+1)``, ``r = 1..m``                   ``Q diag Q x``
anti-reflective    ``0, r pi / (m-1) (r = 1..m-2), 0``              ``T diag T~ x``
=================  ===============================================  ============================

The anti-reflective ``0`` entries belong to the first and last columns of
``T_m``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np
import scipy.fft as sfft

from . import transforms as tr
from .blur import BoundaryCondition, check_support
from .image import as_image
from .psf import Psf, require_strong_symmetry, symbol_grid


class Algebra(str, enum.Enum):
    CIRCULANT = "circulant"
    COSINE = "cosine"
    TAU = "tau"
    ANTIREFLECTIVE = "antireflective"

    @classmethod
    def for_bc(cls, bc) -> "Algebra":
        """Algebra containing the blur matrices of ``bc`` (symmetric PSFs)."""
        bc = BoundaryCondition.parse(bc)
        try:
            return _BC_ALGEBRA[bc]
        except KeyError:
            raise ValueError(f"no fast algebra for {bc.value} boundary conditions") from None


_BC_ALGEBRA = {
    BoundaryCondition.PERIODIC: Algebra.CIRCULANT,
    BoundaryCondition.REFLECTIVE: Algebra.COSINE,
    BoundaryCondition.ANTIREFLECTIVE: Algebra.ANTIREFLECTIVE,
}


@dataclass(frozen=True, eq=False)
class SpectralOperator:
    algebra: Algebra
    eigenvalues: np.ndarray

    def __post_init__(self):
        ev = np.array(self.eigenvalues)
        if ev.ndim != 2:
            raise ValueError("eigenvalue grid must be 2-D")
        if self.algebra is not Algebra.CIRCULANT:
            if np.iscomplexobj(ev):
                if np.abs(ev.imag).max(initial=0.0) > 0:
                    raise ValueError(f"{self.algebra.value} eigenvalues must be real")
                ev = ev.real
            ev = ev.astype(np.float64)
        ev.setflags(write=False)
        object.__setattr__(self, "algebra", Algebra(self.algebra))
        object.__setattr__(self, "eigenvalues", ev)

    @property
    def shape(self) -> tuple[int, int]:
        return self.eigenvalues.shape

    def map(self, func) -> "SpectralOperator":
        """Operator with eigenvalues ``func(eigenvalues)`` in the same algebra."""
        return replace(self, eigenvalues=func(self.eigenvalues))

    def inverse(self) -> "SpectralOperator":
        if np.any(self.eigenvalues == 0):
            raise ZeroDivisionError("singular operator: zero eigenvalue")
        return self.map(lambda ev: 1.0 / ev)

    def __call__(self, x) -> np.ndarray:
        return filter_apply(self, x)


def _ar_grid(m: int) -> np.ndarray:
    grid = np.zeros(m)
    grid[1:-1] = np.arange(1, m - 1) * np.pi / (m - 1)
    return grid


def eig_reflective(p: Psf, shape) -> SpectralOperator:
    """Eigenvalues of the Reflective-BC matrix of a strongly symmetric mask."""
    require_strong_symmetry(p)
    n1, n2 = shape
    check_support(p.q, shape, BoundaryCondition.REFLECTIVE)
    x1 = np.arange(n1) * np.pi / n1
    x2 = np.arange(n2) * np.pi / n2
    return SpectralOperator(Algebra.COSINE, symbol_grid(p, x1, x2))


def eig_tau(p: Psf, shape) -> SpectralOperator:
    require_strong_symmetry(p)
    n1, n2 = shape
    x1 = np.arange(1, n1 + 1) * np.pi / (n1 + 1)
    x2 = np.arange(1, n2 + 1) * np.pi / (n2 + 1)
    return SpectralOperator(Algebra.TAU, symbol_grid(p, x1, x2))


def eig_antireflective(p: Psf, shape) -> SpectralOperator:
    """Eigenvalues of the Anti-Reflective matrix of a strongly symmetric mask.

    The four corners carry ``f(0, 0) = 1``; the border rows and columns carry
    the tau spectra of the column- and row-condensed masks (each twice); the
    interior is the two-level tau spectrum of size ``(n1-2) x (n2-2)``.
    """
    require_strong_symmetry(p)
    n1, n2 = shape
    if min(n1, n2) < 3:
        raise ValueError(f"anti-reflective algebra needs both sides >= 3, got {shape}")
    check_support(p.q, shape, BoundaryCondition.ANTIREFLECTIVE)
    return SpectralOperator(Algebra.ANTIREFLECTIVE, symbol_grid(p, _ar_grid(n1), _ar_grid(n2)))


def eig_periodic(p: Psf, shape) -> SpectralOperator:
    """DFT of the mask embedded circulantly with its center at pixel (0, 0).

    Equals ``symbol_complex(p, 2 pi r1 / n1, 2 pi r2 / n2)``; any mask is
    accepted, so eigenvalues are complex in general.
    """
    n1, n2 = shape
    q1, q2 = p.q
    if 2 * q1 > n1 or 2 * q2 > n2:
        raise ValueError(f"circulant embedding needs q <= n/2 (q={p.q}, n={shape})")
    kernel = np.zeros((n1, n2))
    i1 = np.arange(-q1, q1 + 1) % n1
    i2 = np.arange(-q2, q2 + 1) % n2
    np.add.at(kernel, np.ix_(i1, i2), p.taps)
    return SpectralOperator(Algebra.CIRCULANT, sfft.fft2(kernel))


def eig_for_bc(p: Psf, bc, shape) -> SpectralOperator:
    algebra = Algebra.for_bc(bc)
    return {
        Algebra.CIRCULANT: eig_periodic,
        Algebra.COSINE: eig_reflective,
        Algebra.ANTIREFLECTIVE: eig_antireflective,
    }[algebra](p, shape)


def filter_apply(sop: SpectralOperator, x) -> np.ndarray:
    """Apply the operator ``transform^-1 diag(eigenvalues) transform`` to ``x``.

    For the anti-reflective algebra this is ``T diag T~ x`` (``T~`` first).
    Real input gives real output in every algebra (the circulant result's
    imaginary round-off is dropped).
    """
    x = as_image(x)
    if x.shape != sop.shape:
        raise ValueError(f"image shape {x.shape} does not match operator {sop.shape}")
    ev = sop.eigenvalues
    if sop.algebra is Algebra.CIRCULANT:
        return sfft.ifft2(ev * sfft.fft2(x)).real
    if sop.algebra is Algebra.COSINE:
        return tr.tensor_apply(tr.TransformKind.COSINE3, ev * tr.tensor_apply(tr.TransformKind.COSINE3, x), inverse=True)
    if sop.algebra is Algebra.TAU:
        return tr.tensor_apply(tr.TransformKind.SINE1, ev * tr.tensor_apply(tr.TransformKind.SINE1, x))
    return tr.tensor_apply(
        tr.TransformKind.ANTIREFLECTIVE,
        ev * tr.tensor_apply(tr.TransformKind.ANTIREFLECTIVE_INVERSE, x),
    )


def _analysis(algebra: Algebra, x: np.ndarray) -> np.ndarray:
    """The transform applied first by :func:`filter_apply`."""
    if algebra is Algebra.CIRCULANT:
        return sfft.fft2(x)
    if algebra is Algebra.COSINE:
        return tr.tensor_apply(tr.TransformKind.COSINE3, x)
    if algebra is Algebra.TAU:
        return tr.tensor_apply(tr.TransformKind.SINE1, x)
    return tr.tensor_apply(tr.TransformKind.ANTIREFLECTIVE_INVERSE, x)


def impulse_response(sop: SpectralOperator) -> np.ndarray:
    """Response of the operator to a unit impulse at pixel ``(0, 0)``.

    This is the full ``n1 x n2`` kernel attached to an eigenvalue grid (for
    the circulant algebra, simply the inverse 2-D DFT of the grid).
    """
    e = np.zeros(sop.shape)
    e[0, 0] = 1.0
    return filter_apply(sop, e)


def eigenvalues_from_impulse(kernel, algebra) -> SpectralOperator:
    """Recover an eigenvalue grid from :func:`impulse_response` output.

    Divides the analysis transform of the kernel by that of the impulse.  In
    the anti-reflective algebra the impulse has no component on the last
    border index of either axis; those entries are copied from the first
    border index, which they equal for every member of the algebra.
    """
    algebra = Algebra(algebra)
    kernel = as_image(kernel)
    e = np.zeros(kernel.shape)
    e[0, 0] = 1.0
    num, den = _analysis(algebra, kernel), _analysis(algebra, e)
    if algebra is not Algebra.ANTIREFLECTIVE:
        return SpectralOperator(algebra, num / den)
    ev = np.empty(kernel.shape)
    ev[:-1, :-1] = num[:-1, :-1] / den[:-1, :-1]
    ev[-1, :-1] = ev[0, :-1]
    ev[:, -1] = ev[:, 0]
    return SpectralOperator(algebra, ev)
