import numpy as np
import pytest

from ardeblur.blur import BlurOperator, apply
from ardeblur.image import rre
from ardeblur.precond import FilteredOperator, PreconditionerSpec, build_tikhonov
from ardeblur.psf import Psf, gaussian_portion, random_psf
from ardeblur.solvers import (
    DivergenceError,
    FixedIterations,
    MinRre,
    RelativeResidualBelow,
    RestorationRun,
    SolverConfig,
    d_landweber,
    landweber,
    semiconvergence_report,
    write_history_csv,
)
from ardeblur.spectral import Algebra, SpectralOperator, eig_periodic


def identity_filter(algebra, shape):
    return FilteredOperator(SpectralOperator(algebra, np.ones(shape)), Psf.delta(), 0.0)


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(tau=0)
    with pytest.raises(ValueError):
        SolverConfig(max_iters=0, stop=FixedIterations(1))
    with pytest.raises(ValueError):
        SolverConfig(stop=MinRre())
    with pytest.raises(ValueError):
        FixedIterations(-1)
    with pytest.raises(ValueError):
        RelativeResidualBelow(0.0)


def test_delta_psf_one_step(rng):
    f = rng.random((6, 7)) + 0.5
    op = BlurOperator(Psf.delta(1, 1), "reflective", f.shape)
    run = landweber(op, f, SolverConfig(5, 1.0, MinRre(), f))
    assert run.rre_history[0] == 0.0 and run.best_iteration == 1
    assert np.array_equal(run.restored, f)
    assert all(r == 0.0 for r in run.residual_history)


def test_zero_iterations(rng):
    f = rng.random((5, 5)) + 0.5
    op = BlurOperator(random_psf(rng, (1, 1)), "periodic", f.shape)
    run = landweber(op, f, SolverConfig(10, 1.0, FixedIterations(0), f))
    assert run.iterations_executed == 0 and not run.rre_history
    assert np.all(run.restored == 0) and rre(run.restored, f) == 1.0


def test_fixed_and_residual_stopping(rng):
    f = rng.random((8, 8)) + 0.5
    op = BlurOperator(random_psf(rng, (1, 1), symmetric=True), "reflective", f.shape)
    g = apply(op, f)
    run = landweber(op, g, SolverConfig(50, 1.0, FixedIterations(7)))
    assert run.iterations_executed == 7 and len(run.residual_history) == 7
    run = landweber(op, g, SolverConfig(5000, 1.0, RelativeResidualBelow(1e-3)))
    assert run.residual_history[-1] < 1e-3 * np.linalg.norm(g)
    assert run.residual_history[-2] >= 1e-3 * np.linalg.norm(g)


def test_periodic_per_frequency_recursion(rng):
    for shape, q in [((1, 16), (0, 2)), ((12, 10), (2, 1))]:
        p = random_psf(rng, q, symmetric=True)
        f = rng.random(shape)
        op = BlurOperator(p, "periodic", shape)
        g = apply(op, f)
        k = 20
        run = landweber(op, g, SolverConfig(k, 1.0, FixedIterations(k)))
        lam = eig_periodic(p, shape).eigenvalues
        gh = np.fft.fft2(g)
        safe = np.where(lam == 0, 1, lam)
        xh = np.where(lam == 0, 0, (1 - (1 - np.abs(lam) ** 2) ** k) / safe * gh)
        assert np.max(np.abs(run.restored - np.fft.ifft2(xh).real)) <= 1e-8


def test_periodic_noise_free_rre_non_increasing(rng):
    f = rng.random((16, 16))
    op = BlurOperator(random_psf(rng, (2, 2)), "periodic", f.shape)
    assert np.max(np.abs(eig_periodic(op.psf, f.shape).eigenvalues)) <= 1 + 1e-12
    run = landweber(op, apply(op, f), SolverConfig(200, 1.0, MinRre(), f))
    assert np.all(np.diff(run.rre_history) <= 1e-15)


@pytest.mark.parametrize("bc", ["periodic", "reflective", "antireflective"])
def test_identity_filter_matches_landweber_per_step(bc, rng):
    f = rng.random((10, 11))
    op = BlurOperator(random_psf(rng, (2, 1)), bc, f.shape)
    g = apply(op, f)
    d = identity_filter(Algebra.for_bc(bc), f.shape)
    for k in (1, 2, 5, 17, 50, 100):
        a = landweber(op, g, SolverConfig(k, 1.0, FixedIterations(k)))
        b = d_landweber(op, d, g, SolverConfig(k, 1.0, FixedIterations(k)))
        assert np.max(np.abs(a.restored - b.restored)) <= 1e-12


def test_d_landweber_delta(rng):
    f = rng.random((6, 6)) + 0.2
    op = BlurOperator(Psf.delta(1, 1), "antireflective", f.shape)
    for alpha in (0.0, 0.25):
        d = build_tikhonov(op.psf, PreconditionerSpec.for_bc("ar", alpha), f.shape)
        run = d_landweber(op, d, f, SolverConfig(1, 1.0, FixedIterations(1)))
        np.testing.assert_allclose(run.restored, f / (1 + alpha), atol=1e-13)


def test_d_landweber_mismatch_errors(rng):
    op = BlurOperator(random_psf(rng, (1, 1)), "reflective", (6, 6))
    g = np.ones((6, 6))
    with pytest.raises(ValueError):
        d_landweber(op, identity_filter(Algebra.ANTIREFLECTIVE, (6, 6)), g, SolverConfig(1, stop=FixedIterations(1)))
    with pytest.raises(ValueError):
        d_landweber(op, identity_filter(Algebra.COSINE, (5, 6)), g, SolverConfig(1, stop=FixedIterations(1)))


def test_divergence_guard(rng):
    f = rng.random((6, 6)) + 0.5
    op = BlurOperator(Psf.delta(), "zero", f.shape)
    with pytest.raises(DivergenceError) as info:
        landweber(op, f, SolverConfig(200, 5.0, FixedIterations(200), f))
    assert 10 < info.value.run.iterations_executed < 200


def test_semiconvergence_report():
    mono = RestorationRun(np.zeros(1), 4, 4, [0.9, 0.5, 0.4, 0.3], [1, 1, 1, 1])
    rep = semiconvergence_report(mono)
    assert rep.best_iter == 4 and not rep.diverged_after
    vee = RestorationRun(np.zeros(1), 5, 3, [0.9, 0.5, 0.2, 0.4, 0.8], [1] * 5)
    rep = semiconvergence_report(vee)
    assert rep.best_iter == 3 and rep.best_rre == 0.2 and rep.diverged_after
    with pytest.raises(ValueError):
        semiconvergence_report(RestorationRun(np.zeros(1), 0, 0, [], []))


def test_first_iteration_below():
    run = RestorationRun(np.zeros(1), 4, 4, [0.9, 0.5, 0.4, 0.3], [1] * 4)
    assert run.first_iteration_below(0.45) == 3
    assert run.first_iteration_below(0.1) is None


def test_history_csv_and_determinism(tmp_path, rng):
    f = rng.random((8, 8)) + 0.5
    op = BlurOperator(random_psf(rng, (1, 1)), "antireflective", f.shape)
    g = apply(op, f) + 0.01 * rng.standard_normal(f.shape)
    for name in ("a.csv", "b.csv"):
        write_history_csv(tmp_path / name, landweber(op, g, SolverConfig(30, 1.0, MinRre(), f)))
    text = (tmp_path / "a.csv").read_text()
    assert text == (tmp_path / "b.csv").read_text()
    lines = text.splitlines()
    assert lines[0] == "iter,rre,residual" and len(lines) == 31 and lines[1].startswith("1,")


def test_preconditioning_accelerates_at_64(rng):
    from ardeblur.experiment import ExperimentConfig, fastest_to_target, run_cell, synthesize

    cfg = ExperimentConfig(size=(64, 64), max_iters=6000, d_max_iters=300,
                           alpha_sweep=(1e-3, 0.1, 5))
    psf = cfg.make_psf()
    g, f = synthesize(cfg, psf=psf)
    for bc in ("reflective", "antireflective"):
        plain = run_cell(cfg, psf, bc, "landweber", g, f).run
        cells = [run_cell(cfg, psf, bc, "d-landweber", g, f, a) for a in cfg.alphas()]
        _, k = fastest_to_target(cells, 1.01 * plain.best_rre)
        assert k is not None and 5 * k <= plain.best_iteration
