"""Tikhonov-filtered structured preconditioners.

Within the cosine and anti-reflective algebras, the matrix closest in
Frobenius norm to the blur matrix of an arbitrary PSF is the one generated by
the symmetrized PSF.  The preconditioner ``D`` shares its eigenvectors and
has eigenvalues ``d = 1 / (|lambda|^2 + alpha)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blur import BoundaryCondition
from .psf import Psf, symmetrize
from .spectral import (
    Algebra,
    SpectralOperator,
    eig_antireflective,
    eig_periodic,
    eig_reflective,
    eigenvalues_from_impulse,
    filter_apply,
    impulse_response,
)

PRECONDITIONER_ALGEBRAS = (Algebra.CIRCULANT, Algebra.COSINE, Algebra.ANTIREFLECTIVE)


@dataclass(frozen=True)
class PreconditionerSpec:
    algebra: Algebra
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "algebra", Algebra(self.algebra))
        if self.algebra not in PRECONDITIONER_ALGEBRAS:
            raise ValueError(f"no preconditioner for the {self.algebra.value} algebra")
        if not self.alpha >= 0:
            raise ValueError("alpha must be >= 0")

    @classmethod
    def for_bc(cls, bc, alpha: float) -> "PreconditionerSpec":
        return cls(Algebra.for_bc(BoundaryCondition.parse(bc)), alpha)


@dataclass(frozen=True, eq=False)
class FilteredOperator:
    sop: SpectralOperator
    source_psf: Psf
    alpha: float

    @property
    def algebra(self) -> Algebra:
        return self.sop.algebra

    def __call__(self, r) -> np.ndarray:
        return precondition_apply(self, r)


def optimal_symbol_psf(p: Psf) -> Psf:
    """Mask of the Frobenius-optimal approximation in the cosine or
    anti-reflective algebra: the symmetrized PSF."""
    return symmetrize(p)


def tikhonov_filter(eigenvalues, alpha: float) -> np.ndarray:
    """``1 / (|lambda|^2 + alpha)``."""
    mag2 = np.abs(eigenvalues) ** 2
    if alpha == 0 and np.any(mag2 == 0):
        raise ZeroDivisionError("alpha = 0 with a zero eigenvalue")
    return 1.0 / (mag2 + alpha)


def build_tikhonov(p: Psf, spec: PreconditionerSpec, shape) -> FilteredOperator:
    """Build ``D`` for ``p`` on an ``n1 x n2`` field of view.

    Cosine and anti-reflective preconditioners use the symmetrized mask;
    the circulant one uses the raw mask and its complex spectrum.
    """
    if spec.algebra is Algebra.CIRCULANT:
        source, sop = p, eig_periodic(p, shape)
    else:
        source = optimal_symbol_psf(p)
        eig = eig_reflective if spec.algebra is Algebra.COSINE else eig_antireflective
        sop = eig(source, shape)
    d = SpectralOperator(spec.algebra, tikhonov_filter(sop.eigenvalues, spec.alpha))
    return FilteredOperator(d, source, spec.alpha)


def precondition_apply(d: FilteredOperator, r) -> np.ndarray:
    return filter_apply(d.sop, r)


def psf_of_filter(d: FilteredOperator) -> np.ndarray:
    """Full ``n1 x n2`` spatial kernel of ``D`` (its response to a corner impulse)."""
    return impulse_response(d.sop)


def filter_of_psf(kernel, algebra) -> np.ndarray:
    """Inverse of :func:`psf_of_filter`: the eigenvalue grid of a kernel."""
    return eigenvalues_from_impulse(kernel, algebra).eigenvalues
