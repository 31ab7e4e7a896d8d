import numpy as np
import pytest

from ardeblur.blur import BlurOperator, densify
from ardeblur.psf import Psf, random_psf, symmetrize
from ardeblur.spectral import eig_antireflective

import oracles


def random_row(rng, q):
    h = rng.random(2 * q + 1)
    return h / h.sum()


def test_dense_transforms_agree_with_plans():
    from ardeblur.transforms import ArTransform1D

    for m in (3, 4, 9):
        np.testing.assert_allclose(oracles.dense_T(m), ArTransform1D.of_size(m).matrix(), atol=1e-14)
        np.testing.assert_allclose(oracles.dense_T(m) @ oracles.dense_T_inv(m), np.eye(m), atol=1e-13)


@pytest.mark.parametrize("n", range(7, 13))
def test_ar_1d_generic_matches_densify(n, rng):
    for _ in range(2):
        q = int(rng.integers(1, 4))
        h = random_row(rng, q)
        A = densify(BlurOperator(Psf(h), "antireflective", (1, n)))
        assert np.max(np.abs(oracles.build_ar_1d_generic(h, n).matrix - A)) <= 1e-13


def test_ar_1d_symmetric_collapse(rng):
    h = symmetrize(Psf(random_row(rng, 3))).taps.ravel()
    A = oracles.build_ar_1d_generic(h, 9).matrix
    np.testing.assert_allclose(A[0, 1:4], 0, atol=1e-16)
    np.testing.assert_allclose(A[:4, 0], A[::-1, -1][:4], atol=1e-16)
    np.testing.assert_allclose(oracles.build_ar_1d_generic([1.0], 6).matrix, np.eye(6))


def test_ar_2d_symmetric_matches_densify(rng):
    for _ in range(10):
        p = random_psf(rng, (2, 2), symmetric=True)
        A = densify(BlurOperator(p, "antireflective", (7, 8)))
        assert np.max(np.abs(oracles.build_ar_2d_symmetric(p.taps, 7, 8).matrix - A)) <= 1e-13
    np.testing.assert_allclose(oracles.build_ar_2d_symmetric(Psf.delta(1, 1).taps, 5, 4).matrix, np.eye(20))


def test_ar_2d_symmetric_eigen_reconstruction(rng):
    p = random_psf(rng, (1, 2), symmetric=True)
    n1, n2 = 6, 7
    lam = eig_antireflective(p, (n1, n2)).eigenvalues
    T = np.kron(oracles.dense_T(n1), oracles.dense_T(n2))
    Ti = np.kron(oracles.dense_T_inv(n1), oracles.dense_T_inv(n2))
    rebuilt = T @ np.diag(lam.ravel()) @ Ti
    assert np.max(np.abs(rebuilt - oracles.build_ar_2d_symmetric(p.taps, n1, n2).matrix)) <= 1e-10


def test_other_builders_match_densify(rng):
    for _ in range(10):
        p = random_psf(rng, (2, 1))
        A = densify(BlurOperator(p, "antireflective", (6, 7)))
        assert np.max(np.abs(oracles.build_ar_2d_generic(p.taps, 6, 7).matrix - A)) <= 1e-13
        s = symmetrize(p)
        R = densify(BlurOperator(s, "reflective", (6, 7)))
        assert np.max(np.abs(oracles.build_reflective_2d(s.taps, 6, 7).matrix - R)) <= 1e-13
        T = oracles.build_tau_2d(s.taps, 6, 7).matrix
        AR = densify(BlurOperator(s, "antireflective", (8, 9)))
        inner = np.zeros((8, 9), bool)
        inner[1:-1, 1:-1] = True
        idx = np.flatnonzero(inner)
        assert np.max(np.abs(AR[np.ix_(idx, idx)] - T)) <= 1e-13


def test_support_violation():
    with pytest.raises(ValueError):
        oracles.build_ar_1d_generic(np.ones(7) / 7, 4)


def test_projection_recovers_member(rng):
    s = random_psf(rng, (1, 2), symmetric=True).taps
    A = oracles.build_ar_2d_symmetric(s, 6, 6)
    got = oracles.frobenius_project(A, lambda m: oracles.build_ar_2d_generic(m, 6, 6), (1, 2))
    np.testing.assert_allclose(got, s, atol=1e-12)


def test_projection_is_linear(rng):
    q = (1, 1)
    build = lambda m: oracles.build_ar_2d_generic(m, 5, 5)  # noqa: E731
    A1, A2 = rng.standard_normal((2, 25, 25))
    lhs = oracles.frobenius_project(A1 + A2, build, q)
    rhs = oracles.frobenius_project(A1, build, q) + oracles.frobenius_project(A2, build, q)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_projection_rank_deficient():
    with pytest.raises(np.linalg.LinAlgError):
        oracles.frobenius_project(np.zeros((3, 3)), lambda m: np.zeros((3, 3)), (1, 0))
