"""
Free evolution inside the box in the exact sine eigenbasis.

With no potential inside the box the modes phi_n(x) = sqrt(2/L) sin(n pi x / L)
are the energy eigenstates, so propagation is one phase multiplication per
mode and carries no time-step error. The forward and inverse transforms are
both the type-I discrete sine transform, scaled so that the map from grid
amplitudes to mode coefficients is unitary under the continuum inner product.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from .lattice import Grid, PhysicalParams, WaveFunction, fidelity


@dataclass(frozen=True, eq=False)
class SpectralCoeffs:
    """Coefficients c_n, n = 1..N, over the box eigenmodes."""

    grid: Grid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.shape != (self.grid.n_points,):
            raise ValueError(f"expected {self.grid.n_points} coefficients, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def modes(self) -> np.ndarray:
        return np.arange(1, self.grid.n_points + 1)


def _dst1(a: np.ndarray) -> np.ndarray:
    # unnormalized DST-I: y_k = 2 sum_n a_n sin(pi (k+1)(n+1) / (N+1))
    return scipy.fft.dst(a, type=1)


def to_spectral(wf: WaveFunction) -> SpectralCoeffs:
    """c_n = sum_i psi_i sqrt(2/L) sin(n pi x_i / L) dx."""
    g = wf.grid
    scale = np.sqrt(2.0 / g.length) * g.dx / 2.0
    return SpectralCoeffs(g, _dst1(wf.amps) * scale)


def from_spectral(sc: SpectralCoeffs) -> WaveFunction:
    """psi_i = sum_n c_n sqrt(2/L) sin(n pi x_i / L)."""
    g = sc.grid
    scale = np.sqrt(2.0 / g.length) / 2.0
    return WaveFunction(g, _dst1(sc.coeffs) * scale)


def mode_energy(n: int, grid: Grid, params: PhysicalParams) -> float:
    """E_n = n^2 pi^2 hbar^2 / (2 m L^2) for 1 <= n <= n_points."""
    if not 1 <= n <= grid.n_points:
        raise ValueError(f"mode index {n} outside 1..{grid.n_points}")
    return float(mode_energies(grid, params)[n - 1])


def mode_energies(grid: Grid, params: PhysicalParams) -> np.ndarray:
    n = np.arange(1, grid.n_points + 1, dtype=float)
    return (n * np.pi * params.hbar / grid.length) ** 2 / (2.0 * params.mass)


def mean_energy(sc: SpectralCoeffs, params: PhysicalParams) -> float:
    return float(np.sum(mode_energies(sc.grid, params) * np.abs(sc.coeffs) ** 2))


def evolve_spectral(sc: SpectralCoeffs, t: float, params: PhysicalParams) -> SpectralCoeffs:
    phase = np.exp(-1j * mode_energies(sc.grid, params) * (t / params.hbar))
    return SpectralCoeffs(sc.grid, sc.coeffs * phase)


def evolve(wf: WaveFunction, t: float, params: PhysicalParams) -> WaveFunction:
    """Propagate freely for time ``t``; negative ``t`` runs backwards."""
    if t == 0:
        return wf
    return from_spectral(evolve_spectral(to_spectral(wf), t, params))


def reversal_fidelity(wf0: WaveFunction, t: float, params: PhysicalParams) -> float:
    """Fidelity between ``wf0`` and the state evolved to ``t`` and back."""
    back = evolve(evolve(wf0, t, params), -t, params)
    return fidelity(wf0, back)


def revival_time(grid: Grid, params: PhysicalParams) -> float:
    """4 m L^2 / (pi hbar): every mode phase is a multiple of 2 pi."""
    return 4.0 * params.mass * grid.length**2 / (np.pi * params.hbar)
