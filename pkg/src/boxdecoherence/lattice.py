"""
Spatial discretization of the box (0, L) and wave functions on it.

The lattice holds interior points only, x_i = i * L / (N + 1) for i = 1..N.
Both walls are implicit zeros, so the infinite-wall boundary condition holds
by construction and the lattice is the natural one for the sine transform of
the first kind.

Wave functions are continuum-normalized: sum_i |psi_i|^2 dx = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import erfc

from .errors import ConfigError, GridMismatchError, TailLeakError

MIN_POINTS = 8
TAIL_TOLERANCE = 1e-6


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Grid:
    """Uniform Dirichlet lattice of ``n_points`` interior points on (0, length)."""

    n_points: int
    length: float

    @property
    def dx(self) -> float:
        return self.length / (self.n_points + 1)

    @cached_property
    def coords(self) -> np.ndarray:
        return _readonly(self.dx * np.arange(1, self.n_points + 1, dtype=float))


def make_grid(n_points: int, length: float = 1.0) -> Grid:
    """Build the interior lattice; rejects fewer than 8 points or length <= 0."""
    if int(n_points) != n_points or n_points < MIN_POINTS:
        raise ConfigError(f"n_points must be an integer >= {MIN_POINTS}, got {n_points!r}")
    if not np.isfinite(length) or length <= 0:
        raise ConfigError(f"length must be positive, got {length!r}")
    return Grid(int(n_points), float(length))


@dataclass(frozen=True)
class PhysicalParams:
    """Particle constants and initial-packet parameters.

    ``sigma`` is the standard deviation of the initial position density
    |psi_0|^2, which puts 4 sigma^2 in the amplitude exponent.
    """

    hbar: float = 1.0
    mass: float = 1.0
    p0: float = 30.0
    q0: float = 0.5
    sigma: float = 0.05

    def __post_init__(self):
        for name in ("hbar", "mass", "sigma"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ConfigError(f"{name} must be positive, got {value!r}")
        for name in ("p0", "q0"):
            if not np.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")

    def check_inside(self, length: float) -> None:
        if not 0.0 < self.q0 < length:
            raise ConfigError(f"q0 must lie in (0, {length}), got {self.q0!r}")


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Complex amplitudes psi(x_i) on a grid."""

    grid: Grid
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex)
        if amps.shape != (self.grid.n_points,):
            raise GridMismatchError(
                f"amplitude array has shape {amps.shape}, grid has {self.grid.n_points} points"
            )
        object.__setattr__(self, "amps", _readonly(amps))

    def normalized(self) -> "WaveFunction":
        n2 = norm2(self)
        if n2 == 0.0:
            raise ValueError("cannot normalize the zero wave function")
        return WaveFunction(self.grid, self.amps / np.sqrt(n2))


def norm2(wf: WaveFunction) -> float:
    """Continuum norm squared, sum_i |psi_i|^2 dx."""
    return float(np.sum(np.abs(wf.amps) ** 2) * wf.grid.dx)


def inner(a: WaveFunction, b: WaveFunction) -> complex:
    """<a|b> = sum_i conj(a_i) b_i dx."""
    if a.grid != b.grid:
        raise GridMismatchError(f"grids differ: {a.grid} vs {b.grid}")
    return complex(np.vdot(a.amps, b.amps) * a.grid.dx)


def fidelity(a: WaveFunction, b: WaveFunction) -> float:
    """Squared overlap |<a|b>|^2; insensitive to global phase."""
    return abs(inner(a, b)) ** 2


def tail_mass(length: float, params: PhysicalParams) -> float:
    """Analytic probability of the initial Gaussian density lying outside (0, length)."""
    s = params.sigma * np.sqrt(2.0)
    return float(0.5 * erfc(params.q0 / s) + 0.5 * erfc((length - params.q0) / s))


def gaussian_packet(grid: Grid, params: PhysicalParams) -> WaveFunction:
    """Sample the moving Gaussian packet on the grid and renormalize.

    psi(x) ~ exp(i p0 (x - q0) / hbar) * exp(-(x - q0)^2 / (4 sigma^2))

    Raises
    ------
    TailLeakError
        If more than 1e-6 of the analytic density falls outside the box.
    """
    params.check_inside(grid.length)
    leak = tail_mass(grid.length, params)
    if leak > TAIL_TOLERANCE:
        raise TailLeakError(
            f"packet tail mass outside the box is {leak:.3e} (limit {TAIL_TOLERANCE:g})"
        )
    x = grid.coords - params.q0
    amps = np.exp(1j * params.p0 * x / params.hbar) * np.exp(-(x**2) / (4.0 * params.sigma**2))
    return WaveFunction(grid, amps).normalized()


def position_moments(amps: np.ndarray, grid: Grid) -> tuple[float, float]:
    """Mean and standard deviation of position under the density |amps|^2 dx.

    The density is normalized internally, so unnormalized input is fine.
    """
    w = np.abs(np.asarray(amps)) ** 2
    total = np.sum(w)
    if total == 0.0:
        return float("nan"), float("nan")
    w = w / total
    x = grid.coords
    mean = float(np.sum(w * x))
    var = float(np.sum(w * (x - mean) ** 2))
    return mean, float(np.sqrt(max(var, 0.0)))


def momentum_expectation(wf: WaveFunction, hbar: float = 1.0) -> float:
    """<p> = -i hbar sum psi* dpsi/dx dx, central differences with zero walls."""
    padded = np.concatenate(([0.0], wf.amps, [0.0]))
    deriv = (padded[2:] - padded[:-2]) / (2.0 * wf.grid.dx)
    return float(np.real(-1j * hbar * np.vdot(wf.amps, deriv) * wf.grid.dx))
