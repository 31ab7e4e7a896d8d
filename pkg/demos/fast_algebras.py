"""
Fast transforms that diagonalize the blur
=========================================

For a strongly symmetric mask the Reflective matrix is diagonalized by the
cosine transform and the Anti-Reflective one by the pair (T, T~).  The
eigenvalues are samples of the mask's cosine symbol, so no matrix is ever
formed.
"""

import numpy as np

from ardeblur import BlurOperator, apply, densify, eig_antireflective, eig_reflective, filter_apply, gaussian_portion
from ardeblur.transforms import ArTransform1D

psf = gaussian_portion(1.2, 2)  # centered, hence strongly symmetric
shape = (9, 10)

# eigenvalues from the symbol against a dense eigensolver
for name, eig, bc in (("reflective", eig_reflective, "reflective"),
                      ("anti-reflective", eig_antireflective, "antireflective")):
    fast = np.sort(eig(psf, shape).eigenvalues.ravel())
    dense = np.sort(np.linalg.eigvals(densify(BlurOperator(psf, bc, shape))).real)
    print(f"{name:>16}: largest eigenvalue gap {np.abs(fast - dense).max():.1e}")

# the anti-reflective spectrum has four eigenvalues equal to one, at the
# corners of the eigenvalue grid
ev = eig_antireflective(psf, shape).eigenvalues
print("corner eigenvalues:", ev[0, 0], ev[0, -1], ev[-1, 0], ev[-1, -1])

# T is not orthogonal, but its first and last columns have unit length
t = ArTransform1D.of_size(7)
T = t.matrix()
print("T_7 border column norms:", np.linalg.norm(T[:, 0]), np.linalg.norm(T[:, -1]))
print("max |T T~ - I|:", np.abs(T @ t.inverse_matrix() - np.eye(7)).max())

# applying the blur through the transforms equals pad-and-convolve
x = np.random.default_rng(1).random(shape)
via_transforms = filter_apply(eig_antireflective(psf, shape), x)
via_padding = apply(BlurOperator(psf, "antireflective", shape), x)
print("transform vs padding apply:", np.abs(via_transforms - via_padding).max())
