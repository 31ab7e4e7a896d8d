"""Landweber and preconditioned (D-)Landweber iterations.

Both use the reblurring matrix ``A'`` (rotated PSF, same BC) in place of the
adjoint::

    x_{k+1} = x_k + tau * D A' (g - A x_k),   x_0 = 0

with ``D = I`` for plain Landweber.  Iterations are counted from 1: entry
``k-1`` of each history belongs to ``x_k``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .blur import BlurOperator, apply
from .image import as_image, rre
from .precond import FilteredOperator, precondition_apply
from .spectral import Algebra

DIVERGENCE_FACTOR = 1e8
SEMICONVERGENCE_MARGIN = 0.05


@dataclass(frozen=True)
class FixedIterations:
    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("iteration count must be >= 0")


@dataclass(frozen=True)
class MinRre:
    """Run to ``max_iters`` and return the iterate with the smallest error.

    Needs the true image, so it is an oracle (non-blind) stopping rule.
    """


@dataclass(frozen=True)
class RelativeResidualBelow:
    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be > 0")


StoppingRule = Union[FixedIterations, MinRre, RelativeResidualBelow]


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 1000
    tau: float = 1.0
    stop: StoppingRule = field(default_factory=MinRre)
    track_rre_against: Optional[np.ndarray] = None

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if isinstance(self.stop, MinRre) and self.track_rre_against is None:
            raise ValueError("MinRre stopping needs track_rre_against (the true image)")


@dataclass
class RestorationRun:
    restored: np.ndarray
    iterations_executed: int
    best_iteration: int
    rre_history: list[float]
    residual_history: list[float]
    preconditioned: bool = False

    @property
    def best_rre(self) -> float:
        if not self.rre_history:
            raise ValueError("run has no RRE history")
        return self.rre_history[self.best_iteration - 1]

    def first_iteration_below(self, threshold: float) -> Optional[int]:
        """First iteration whose RRE is <= ``threshold``, or None."""
        hits = np.flatnonzero(np.asarray(self.rre_history) <= threshold)
        return int(hits[0]) + 1 if hits.size else None


class DivergenceError(RuntimeError):
    def __init__(self, message, run: RestorationRun):
        super().__init__(message)
        self.run = run


def _iterate(op: BlurOperator, g, cfg: SolverConfig, d: Optional[FilteredOperator]):
    g = as_image(g)
    if g.shape != op.shape:
        raise ValueError(f"data shape {g.shape} does not match operator {op.shape}")
    truth = cfg.track_rre_against
    if truth is not None:
        truth = as_image(truth)
    stop = cfg.stop
    n_iters = min(stop.k, cfg.max_iters) if isinstance(stop, FixedIterations) else cfg.max_iters
    keep_best = isinstance(stop, MinRre)

    reblur = op.reblurred()
    g_norm = np.linalg.norm(g)
    limit = DIVERGENCE_FACTOR * g_norm
    x = np.zeros_like(g)
    r = g.copy()
    rre_hist: list[float] = []
    res_hist: list[float] = []
    best_x, best_err = x, np.inf

    def run_so_far(restored):
        k = len(res_hist)
        best = int(np.argmin(rre_hist)) + 1 if rre_hist else k
        return RestorationRun(restored, k, best, rre_hist, res_hist, d is not None)

    for _ in range(n_iters):
        step = apply(reblur, r)
        if d is not None:
            step = precondition_apply(d, step)
        x = x + cfg.tau * step
        r = g - apply(op, x)
        res_hist.append(float(np.linalg.norm(r)))
        if truth is not None:
            err = rre(x, truth)
            rre_hist.append(err)
            if keep_best and err < best_err:
                best_x, best_err = x, err
        if not np.linalg.norm(x) <= limit:
            raise DivergenceError(
                f"iterate norm exceeded {DIVERGENCE_FACTOR:g} * ||g|| "
                f"at iteration {len(res_hist)}",
                run_so_far(x),
            )
        if isinstance(stop, RelativeResidualBelow) and res_hist[-1] < stop.eps * g_norm:
            break

    return run_so_far(best_x if keep_best and rre_hist else x)


def landweber(op: BlurOperator, g, cfg: SolverConfig) -> RestorationRun:
    """Plain Landweber with the reblurring adjoint, starting from zero."""
    return _iterate(op, g, cfg, None)


def d_landweber(op: BlurOperator, d: FilteredOperator, g, cfg: SolverConfig) -> RestorationRun:
    """Landweber preconditioned by ``d`` after the reblurring adjoint."""
    if Algebra.for_bc(op.bc) is not d.algebra:
        raise ValueError(
            f"{d.algebra.value} preconditioner does not match {op.bc.value} boundary conditions"
        )
    if d.sop.shape != op.shape:
        raise ValueError(f"preconditioner shape {d.sop.shape} != operator shape {op.shape}")
    return _iterate(op, g, cfg, d)


@dataclass(frozen=True)
class SemiconvergenceReport:
    best_iter: int
    best_rre: float
    diverged_after: bool


def semiconvergence_report(run: RestorationRun, margin: float = SEMICONVERGENCE_MARGIN) -> SemiconvergenceReport:
    """Locate the RRE minimum and flag a final error more than ``margin``
    (relative) above it."""
    hist = np.asarray(run.rre_history)
    if hist.size == 0:
        raise ValueError("run has no RRE history")
    k = int(np.argmin(hist))
    return SemiconvergenceReport(k + 1, float(hist[k]), bool(hist[-1] > (1 + margin) * hist[k]))


def write_history_csv(path, run: RestorationRun) -> None:
    """Write ``iter,rre,residual`` rows (``rre`` empty when untracked)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iter", "rre", "residual"])
        for k, res in enumerate(run.residual_history, start=1):
            err = repr(run.rre_history[k - 1]) if run.rre_history else ""
            w.writerow([k, err, repr(res)])
