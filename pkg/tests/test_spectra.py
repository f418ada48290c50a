import numpy as np
import pytest
import scipy.linalg

from boxdecoherence import lattice, propagator, spectra
from boxdecoherence.decoherence import DensityMatrix, apply_decoherence, pure_density
from boxdecoherence.errors import NoConvergenceError, NonHermitianError
from boxdecoherence.lattice import Grid, WaveFunction, make_grid

from conftest import PAPER
from oracles import jacobi_eigvals, random_psd_kernel


def _check_invariants(eig, rho):
    dx = rho.grid.dx
    lam, v = eig.eigenvalues, eig.eigenvectors
    # descending, up to reordering inside degenerate clusters
    assert np.all(np.diff(lam) <= spectra.DEGENERACY_TOL * lam[0])
    assert abs(np.sum(lam) - np.trace(rho.kernel).real * dx) < 1e-8
    assert lam[-1] >= -1e-10 * lam[0]
    gram = v.conj().T @ v * dx
    assert np.max(np.abs(gram - np.eye(len(lam)))) < 1e-8
    a = rho.weighted
    resid = np.linalg.norm(a @ v - v * lam, axis=0) / np.sqrt(np.sum(np.abs(v) ** 2, axis=0))
    assert resid.max() / np.linalg.norm(a, 2) < 1e-8


@pytest.fixture(scope="module")
def evolved256():
    g = make_grid(256, 1.0)
    return propagator.evolve(lattice.gaussian_packet(g, PAPER), 0.5, PAPER)


def test_rank_one(evolved256):
    rho = pure_density(evolved256)
    eig = spectra.eigh(rho)
    _check_invariants(eig, rho)
    assert abs(eig.eigenvalues[0] - 1) < 1e-10
    assert np.max(np.abs(eig.eigenvalues[1:])) < 1e-10
    top = WaveFunction(rho.grid, eig.eigenvectors[:, 0])
    assert abs(lattice.fidelity(top, evolved256) - 1) < 1e-10
    assert spectra.effective_rank(eig) == pytest.approx(1.0, abs=1e-8)


def test_diagonal_kernel(evolved256):
    g = evolved256.grid
    dens = np.abs(evolved256.amps) ** 2
    rho = DensityMatrix(g, np.diag(dens))
    eig = spectra.eigh(rho)
    np.testing.assert_allclose(eig.eigenvalues, np.sort(dens * g.dx)[::-1], atol=1e-15)
    # every eigenvector is a single-point spike
    assert np.all(np.sum(np.abs(eig.eigenvectors) > 1e-12, axis=0) == 1)


def test_two_by_two_closed_form():
    g = Grid(2, 3.0)  # dx = 1, so the kernel is the operator
    rho = DensityMatrix(g, 0.5 * np.array([[1, -1j], [1j, 1]]))
    eig = spectra.eigh(rho)
    np.testing.assert_allclose(eig.eigenvalues, [1.0, 0.0], atol=1e-15)


def test_decohered_invariants(evolved256):
    rho = apply_decoherence(pure_density(evolved256), 0.01)
    eig = spectra.eigh(rho)
    _check_invariants(eig, rho)
    assert spectra.effective_rank(eig) == pytest.approx(1 / np.sum(eig.eigenvalues**2), rel=1e-12)


def test_effective_rank_equal_weights():
    g = Grid(8, 9.0)
    for k in (1, 3, 8):
        kern = np.diag([1 / k] * k + [0.0] * (8 - k))
        eig = spectra.eigh(DensityMatrix(g, kern))
        assert spectra.effective_rank(eig) == pytest.approx(k, rel=1e-12)
    with pytest.raises(ValueError):
        spectra.effective_rank(spectra.eigh(DensityMatrix(g, np.zeros((8, 8)))))


@pytest.mark.parametrize("n", [8, 16, 24, 32])
def test_jacobi_oracle(rng, n):
    g = Grid(n, n + 1.0)  # dx = 1
    kern = random_psd_kernel(rng, n)
    eig = spectra.eigh(DensityMatrix(g, kern))
    np.testing.assert_allclose(eig.eigenvalues, jacobi_eigvals(kern), atol=1e-9)


def test_reconstruction_16(rng):
    for _ in range(10):
        g = Grid(16, 1.0)
        kern = random_psd_kernel(rng, 16) / g.dx
        eig = spectra.eigh(DensityMatrix(g, kern))
        assert np.max(np.abs(eig.reconstruct() - kern)) < 1e-7


def test_grid_reversal_invariance(evolved256):
    rho = apply_decoherence(pure_density(evolved256), 0.02)
    flipped = DensityMatrix(rho.grid, rho.kernel[::-1, ::-1])
    a, b = spectra.eigh(rho), spectra.eigh(flipped)
    np.testing.assert_allclose(a.eigenvalues, b.eigenvalues, atol=1e-10)


def test_degenerate_ties_sorted_by_position():
    g = make_grid(16, 1.0)
    kern = np.zeros((16, 16))
    for i in (12, 3, 7):
        kern[i, i] = 1.0
    eig = spectra.eigh(DensityMatrix(g, kern))
    peaks = np.argmax(np.abs(eig.eigenvectors[:, :3]), axis=0)
    assert list(peaks) == [3, 7, 12]
    assert np.all(np.diff(eig.mean_positions()[:3]) > 0)


def test_phase_convention(evolved256):
    eig = spectra.eigh(apply_decoherence(pure_density(evolved256), 0.01))
    v = eig.eigenvectors
    pivot = v[np.argmax(np.abs(v), axis=0), np.arange(v.shape[1])]
    assert np.all(pivot.imag == 0) and np.all(pivot.real > 0)


def test_deterministic(evolved256):
    rho = apply_decoherence(pure_density(evolved256), 0.01)
    a, b = spectra.eigh(rho), spectra.eigh(rho)
    np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues)
    np.testing.assert_array_equal(a.eigenvectors, b.eigenvectors)


def test_non_hermitian_rejected():
    g = make_grid(8, 1.0)
    kern = np.eye(8, dtype=complex)
    kern[0, 1] = 1e-6
    with pytest.raises(NonHermitianError):
        spectra.eigh(DensityMatrix(g, kern))


def test_lapack_failure_maps_to_no_convergence(monkeypatch):
    def boom(*args, **kwargs):
        raise scipy.linalg.LinAlgError("did not converge")

    monkeypatch.setattr(spectra.scipy.linalg, "eigh", boom)
    with pytest.raises(NoConvergenceError):
        spectra.eigh(DensityMatrix(make_grid(8, 1.0), np.eye(8)))
