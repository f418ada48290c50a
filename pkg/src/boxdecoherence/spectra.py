"""
Dense Hermitian eigendecomposition of the weighted density operator.

The diagonalization itself is delegated to LAPACK (``scipy.linalg.eigh``
with the MRRR driver). This module owns the contract around it: Hermiticity
validation, continuum normalization of eigenvectors, a fixed phase
convention, and deterministic ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .decoherence import DensityMatrix
from .errors import NoConvergenceError, NonHermitianError
from .lattice import Grid

HERMITIAN_TOL = 1e-12
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenvalues in descending order; column k of ``eigenvectors`` is v_k(x_i).

    Columns are continuum-normalized, sum_i |v_k(x_i)|^2 dx = 1.
    """

    grid: Grid
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("eigenvalues", "eigenvectors"):
            getattr(self, name).setflags(write=False)

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        """Kernel rho(x_i, x_j) = sum_k lambda_k v_k(x_i) conj(v_k(x_j))."""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def mean_positions(self) -> np.ndarray:
        p = np.abs(self.eigenvectors) ** 2 * self.grid.dx
        return self.grid.coords @ p


def _fix_phases(v: np.ndarray) -> np.ndarray:
    # largest-modulus entry of each column made real and positive; first index wins ties
    idx = np.argmax(np.abs(v), axis=0)
    pivot = v[idx, np.arange(v.shape[1])]
    mag = np.abs(pivot)
    v = v * (np.conj(pivot) / mag)[None, :]
    v[idx, np.arange(v.shape[1])] = mag
    return v


def _order(w: np.ndarray, xmean: np.ndarray) -> np.ndarray:
    """Descending eigenvalue order; inside a degenerate cluster, ascending <x>.

    A cluster collects eigenvalues within 1e-10 * |lambda_1| of its largest
    member, so its total spread stays below that tolerance.
    """
    desc = np.argsort(-w, kind="stable")
    ws = w[desc]
    if len(ws) == 0:
        return desc
    tol = DEGENERACY_TOL * max(abs(ws[0]), np.finfo(float).tiny)
    cluster = np.empty(len(ws), dtype=int)
    head, label = ws[0], 0
    for i, value in enumerate(ws):
        if head - value >= tol:
            head, label = value, label + 1
        cluster[i] = label
    return desc[np.lexsort((xmean[desc], cluster))]


def check_hermitian(kernel: np.ndarray) -> float:
    """Largest |k_ij - conj(k_ji)|, relative to max |k_ij| when that exceeds 1."""
    asym = float(np.max(np.abs(kernel - kernel.conj().T))) if kernel.size else 0.0
    scale = max(1.0, float(np.max(np.abs(kernel)))) if kernel.size else 1.0
    return asym / scale


def eigh(rho: DensityMatrix) -> EigenDecomposition:
    """Full eigendecomposition of the weighted operator rho * dx.

    Raises
    ------
    NonHermitianError
        If the kernel's asymmetry exceeds 1e-12.
    NoConvergenceError
        If LAPACK reports a failure.
    """
    asym = check_hermitian(rho.kernel)
    if asym >= HERMITIAN_TOL:
        raise NonHermitianError(f"kernel asymmetry {asym:.3e} exceeds {HERMITIAN_TOL:g}")
    grid = rho.grid
    try:
        w, v = scipy.linalg.eigh(rho.weighted, driver="evr", check_finite=True)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise NoConvergenceError(str(exc)) from exc
    v = _fix_phases(v) / np.sqrt(grid.dx)
    xmean = grid.coords @ (np.abs(v) ** 2 * grid.dx)
    order = _order(w, xmean)
    return EigenDecomposition(grid, np.ascontiguousarray(w[order]), np.ascontiguousarray(v[:, order]))


def effective_rank(eig: EigenDecomposition) -> float:
    """Participation number (sum lambda)^2 / sum lambda^2 of the spectrum."""
    lam = eig.eigenvalues
    sq = float(np.sum(lam**2))
    if sq == 0.0:
        raise ValueError("effective rank undefined for an all-zero spectrum")
    return float(np.sum(lam)) ** 2 / sq
