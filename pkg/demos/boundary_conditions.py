"""
What the four boundary conditions do at the border
==================================================

A blurred pixel near the border depends on scene content outside the field
of view.  Each boundary condition guesses that content from the inside.
"""

import numpy as np

from ardeblur import BlurOperator, Psf, apply, apply_reblur_adjoint, densify, pad

# a small ramp makes the difference between the rules easy to read
f = np.add.outer(np.arange(4.0), 10 * np.arange(5.0)) + 1
mask = Psf.delta(1, 2)  # only the support size matters for padding
np.set_printoptions(precision=1, suppress=True, linewidth=110)

for bc in ("zero", "periodic", "reflective", "antireflective"):
    print(f"\n{bc} padding of the 4x5 ramp:")
    print(pad(f, mask, bc))

# anti-reflection continues linear trends, so a ramp is blurred without
# artificial edges; the reflective rule folds the ramp back on itself
blur = Psf(np.array([[0.1, 0.2, 0.4, 0.2, 0.1]]))
row = np.arange(1.0, 9.0)[None, :]
for bc in ("reflective", "antireflective"):
    print(f"\nblurred ramp, {bc}:", apply(BlurOperator(blur, bc, row.shape), row).ravel())

# the reblurring adjoint uses the rotated mask with the same boundary
# condition; it is the true transpose only for zero and periodic borders
rng = np.random.default_rng(0)
taps = rng.random((3, 3))
skew = Psf(taps / taps.sum())
r = rng.standard_normal((5, 5))
for bc in ("periodic", "reflective", "antireflective"):
    op = BlurOperator(skew, bc, r.shape)
    gap = np.linalg.norm(apply_reblur_adjoint(op, r).ravel() - densify(op).T @ r.ravel())
    print(f"\n|A' r - A^T r| for {bc}: {gap:.2e}")
