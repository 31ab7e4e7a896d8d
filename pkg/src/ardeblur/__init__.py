"""Image deblurring with Zero, Periodic, Reflective and Anti-Reflective
boundary conditions, structured-algebra preconditioners and (preconditioned)
Landweber restoration."""

from .blur import (
    BlurOperator,
    BoundaryCondition,
    SupportError,
    apply,
    apply_reblur_adjoint,
    densify,
    pad,
)
from .image import NoiseSpec, add_noise, read_pgm, rre, synthetic_scene, write_pgm
from .precond import (
    FilteredOperator,
    PreconditionerSpec,
    build_tikhonov,
    optimal_symbol_psf,
    precondition_apply,
    psf_of_filter,
)
from .psf import (
    Psf,
    PsfError,
    gaussian_portion,
    rotate180,
    symbol_complex,
    symbol_real,
    symmetrize,
    symmetry_report,
)
from .solvers import (
    FixedIterations,
    MinRre,
    RelativeResidualBelow,
    RestorationRun,
    SolverConfig,
    d_landweber,
    landweber,
    semiconvergence_report,
)
from .spectral import (
    Algebra,
    SpectralOperator,
    eig_antireflective,
    eig_periodic,
    eig_reflective,
    eig_tau,
    filter_apply,
)
from .transforms import ArTransform1D, TransformKind, tensor_apply

__version__ = "0.1.0"
