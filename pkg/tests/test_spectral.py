import numpy as np
import pytest

from ardeblur.blur import BlurOperator, apply, densify
from ardeblur.psf import Psf, random_psf, symbol_real
from ardeblur.spectral import (
    Algebra,
    SpectralOperator,
    eig_antireflective,
    eig_for_bc,
    eig_periodic,
    eig_reflective,
    eig_tau,
    eigenvalues_from_impulse,
    filter_apply,
    impulse_response,
)

import oracles


def sorted_close(a, b, tol):
    a, b = np.sort_complex(np.ravel(a).astype(complex)), np.sort_complex(np.ravel(b).astype(complex))
    return np.max(np.abs(a - b)) <= tol


def test_algebra_for_bc():
    assert Algebra.for_bc("ar") is Algebra.ANTIREFLECTIVE
    assert Algebra.for_bc("reflective") is Algebra.COSINE
    assert Algebra.for_bc("periodic") is Algebra.CIRCULANT
    with pytest.raises(ValueError):
        Algebra.for_bc("zero")


@pytest.mark.parametrize("eig", [eig_reflective, eig_tau, eig_antireflective, eig_periodic])
def test_delta_gives_ones(eig):
    np.testing.assert_allclose(eig(Psf.delta(1, 1), (6, 7)).eigenvalues, 1.0, atol=1e-15)


def test_reflective_examples(rng):
    p = random_psf(rng, (2, 2), symmetric=True)
    ev = eig_reflective(p, (8, 8)).eigenvalues
    assert ev[0, 0] == pytest.approx(1.0, abs=1e-14)
    dense = np.linalg.eigvals(densify(BlurOperator(p, "reflective", (8, 8))))
    assert sorted_close(ev, dense.real, 1e-8) and np.max(np.abs(dense.imag)) < 1e-8


def test_symmetric_only():
    p = Psf([0.1, 0.5, 0.4])
    for eig in (eig_reflective, eig_tau, eig_antireflective):
        with pytest.raises(ValueError):
            eig(p, (5, 5))


def test_periodic_examples(rng):
    p = random_psf(rng, (1, 2))
    ev = eig_periodic(p, (8, 8)).eigenvalues
    dense = np.linalg.eigvals(densify(BlurOperator(p, "periodic", (8, 8))))
    assert sorted_close(ev, dense, 1e-8)
    s = random_psf(rng, (2, 2), symmetric=True)
    assert np.max(np.abs(eig_periodic(s, (8, 9)).eigenvalues.imag)) <= 1e-12
    with pytest.raises(ValueError):
        eig_periodic(p, (8, 3))


def test_tau_example():
    ev = eig_tau(Psf([0.25, 0.5, 0.25]), (1, 3)).eigenvalues.ravel()
    np.testing.assert_allclose(ev, [(2 + np.sqrt(2)) / 4, 0.5, (2 - np.sqrt(2)) / 4], atol=1e-15)


def test_tau_matches_structural_oracle(rng):
    p = random_psf(rng, (2, 2), symmetric=True)
    T = oracles.build_tau_2d(p.taps, 7, 7).matrix
    assert sorted_close(eig_tau(p, (7, 7)).eigenvalues, np.linalg.eigvalsh(T), 1e-8)


def test_ar_corners_and_dense(rng):
    p = random_psf(rng, (1, 1), symmetric=True)
    ev = eig_antireflective(p, (7, 8)).eigenvalues
    for i, j in [(0, 0), (0, 7), (6, 0), (6, 7)]:
        assert ev[i, j] == symbol_real(p, 0.0, 0.0)
    dense = np.linalg.eigvals(densify(BlurOperator(p, "antireflective", (7, 8))))
    assert sorted_close(ev, dense, 1e-8)


def test_ar_multiplicity_groups(rng):
    p = random_psf(rng, (2, 1), symmetric=True)
    n1, n2 = 9, 7
    ev = eig_antireflective(p, (n1, n2)).eigenvalues
    assert np.sum(np.abs(ev - 1) < 1e-12) == 4
    # border groups: tau spectra of the condensed masks, each appearing twice
    rows = eig_tau(Psf(p.taps.sum(axis=0)), (1, n2 - 2)).eigenvalues.ravel()
    cols = eig_tau(Psf(p.taps.sum(axis=1)), (1, n1 - 2)).eigenvalues.ravel()
    np.testing.assert_allclose(ev[0, 1:-1], rows, atol=1e-14)
    np.testing.assert_allclose(ev[-1, 1:-1], rows, atol=1e-14)
    np.testing.assert_allclose(ev[1:-1, 0], cols, atol=1e-14)
    np.testing.assert_allclose(ev[1:-1, -1], cols, atol=1e-14)
    np.testing.assert_allclose(ev[1:-1, 1:-1], eig_tau(p, (n1 - 2, n2 - 2)).eigenvalues, atol=1e-14)


def test_ar_size_and_support_errors(rng):
    p = random_psf(rng, (3, 3), symmetric=True)
    with pytest.raises(ValueError):
        eig_antireflective(p, (4, 9))
    with pytest.raises(ValueError):
        eig_antireflective(Psf.delta(), (2, 5))


@pytest.mark.parametrize("bc", ["periodic", "reflective", "antireflective"])
def test_filter_reconstructs_operator(bc, rng):
    for _ in range(4):
        n = tuple(rng.integers(6, 17, 2))
        p = random_psf(rng, tuple(rng.integers(0, 3, 2)), symmetric=True)
        v = rng.standard_normal(n)
        got = filter_apply(eig_for_bc(p, bc, n), v)
        ref = apply(BlurOperator(p, bc, n), v)
        assert np.linalg.norm(got - ref) <= 1e-10 * np.linalg.norm(v)


def test_tau_filter_matches_dense(rng):
    p = random_psf(rng, (1, 2), symmetric=True)
    v = rng.standard_normal((6, 7))
    T = oracles.build_tau_2d(p.taps, 6, 7).matrix
    np.testing.assert_allclose(filter_apply(eig_tau(p, (6, 7)), v).ravel(), T @ v.ravel(), atol=1e-12)


@pytest.mark.parametrize("algebra", list(Algebra))
def test_filter_constant_eigenvalues(algebra, rng):
    x = rng.standard_normal((5, 6))
    sop = SpectralOperator(algebra, np.full((5, 6), 2.5))
    np.testing.assert_allclose(filter_apply(sop, x), 2.5 * x, atol=1e-12)
    np.testing.assert_allclose(filter_apply(SpectralOperator(algebra, np.ones((5, 6))), x), x, atol=1e-13)
    with pytest.raises(ValueError):
        filter_apply(sop, np.ones((5, 5)))


@pytest.mark.parametrize("algebra", list(Algebra))
def test_impulse_round_trip(algebra, rng):
    ev = rng.uniform(0.1, 2.0, (6, 7))
    if algebra is Algebra.CIRCULANT:
        # real operators have conjugate-symmetric spectra
        ev = np.fft.fft2(rng.standard_normal((6, 7)))
    if algebra is Algebra.ANTIREFLECTIVE:
        ev[-1, :] = ev[0, :]
        ev[:, -1] = ev[:, 0]
    sop = SpectralOperator(algebra, ev)
    back = eigenvalues_from_impulse(impulse_response(sop), algebra).eigenvalues
    np.testing.assert_allclose(back, ev, atol=1e-10)
