"""
Interference-node detection and eigenstate localization metrics.

Near-zero minima of |psi|^2 cut the box into blocks. After strong
decoherence the density kernel is close to block diagonal in that
partition, so its heavy eigenstates each live inside one block and are no
wider than the interference scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidPartitionError
from .lattice import Grid, PhysicalParams, WaveFunction, position_moments
from .spectra import EigenDecomposition, effective_rank

DEFAULT_REL_THRESHOLD = 0.02
DEFAULT_WEIGHT_CUTOFF = 0.9


def de_broglie_wavelength(params: PhysicalParams) -> float:
    return 2.0 * np.pi * params.hbar / abs(params.p0)


def density_profile(wf: WaveFunction) -> np.ndarray:
    return np.abs(wf.amps) ** 2


@dataclass(frozen=True, eq=False)
class BlockPartition:
    """Consecutive index ranges [start, stop) split at density nodes.

    ``node_indices[j]`` is the grid index of node j and is also the first
    index of block j + 1.
    """

    node_positions: np.ndarray
    node_indices: np.ndarray
    blocks: tuple[tuple[int, int], ...]

    @classmethod
    def from_nodes(cls, node_indices, node_positions, n_points: int) -> "BlockPartition":
        idx = [int(i) for i in node_indices]
        edges = [0, *idx, n_points]
        blocks = tuple(zip(edges[:-1], edges[1:]))
        part = cls(np.asarray(node_positions, dtype=float), np.asarray(idx, dtype=int), blocks)
        part.validate(n_points)
        return part

    @classmethod
    def single(cls, n_points: int) -> "BlockPartition":
        return cls.from_nodes([], [], n_points)

    def __len__(self) -> int:
        return len(self.blocks)

    def validate(self, n_points: int) -> None:
        """Raise InvalidPartitionError on gaps, overlaps, empty blocks or bad coverage."""
        if not self.blocks:
            raise InvalidPartitionError("partition has no blocks")
        expected = 0
        for a, b in self.blocks:
            if a != expected:
                kind = "gap" if a > expected else "overlap"
                raise InvalidPartitionError(f"{kind} at index {expected} (block starts at {a})")
            if b <= a:
                raise InvalidPartitionError(f"empty or reversed block ({a}, {b})")
            expected = b
        if expected != n_points:
            raise InvalidPartitionError(f"blocks cover {expected} of {n_points} points")

    def labels(self) -> np.ndarray:
        """Block number of every grid index."""
        n = self.blocks[-1][1]
        out = np.empty(n, dtype=int)
        for k, (a, b) in enumerate(self.blocks):
            out[a:b] = k
        return out

    def block_masses(self, weights: np.ndarray) -> np.ndarray:
        return np.array([np.sum(weights[a:b]) for a, b in self.blocks])

    @property
    def mean_spacing(self) -> Optional[float]:
        if len(self.node_positions) < 2:
            return None
        return float(np.mean(np.diff(self.node_positions)))


def find_nodes(
    profile: np.ndarray, grid: Grid, rel_threshold: float = DEFAULT_REL_THRESHOLD
) -> BlockPartition:
    """Locate near-zero minima of a density profile and partition the grid there.

    A node is a strict local minimum whose value is below
    ``rel_threshold * max(profile)``. Its position is refined by a parabola
    through the minimum and its two neighbours.

    Parameters
    ----------
    profile : ndarray
        Density samples on ``grid``.
    grid : Grid
    rel_threshold : float
        Fraction of the peak below which a minimum counts as a node, in (0, 1).

    Returns
    -------
    BlockPartition
        A single block when no node is found.
    """
    if not 0.0 < rel_threshold < 1.0:
        raise ValueError(f"rel_threshold must lie in (0, 1), got {rel_threshold!r}")
    y = np.asarray(profile, dtype=float)
    if y.shape != (grid.n_points,):
        raise ValueError(f"profile has shape {y.shape}, grid has {grid.n_points} points")
    left, mid, right = y[:-2], y[1:-1], y[2:]
    is_node = (mid < left) & (mid < right) & (mid < rel_threshold * np.max(y))
    idx = np.flatnonzero(is_node) + 1

    curv = y[idx - 1] - 2.0 * y[idx] + y[idx + 1]
    shift = 0.5 * (y[idx - 1] - y[idx + 1]) / curv
    positions = grid.coords[idx] + np.clip(shift, -0.5, 0.5) * grid.dx
    return BlockPartition.from_nodes(idx, positions, grid.n_points)


def eigenstate_width(v: np.ndarray, grid: Grid) -> float:
    """Standard deviation of position under |v|^2."""
    return position_moments(v, grid)[1]


def ipr_length(v: np.ndarray, grid: Grid) -> float:
    """Inverse participation length 1 / sum |v|^4 dx of a continuum-normalized vector."""
    return float(1.0 / (np.sum(np.abs(v) ** 4) * grid.dx))


def weighted_median(values, weights) -> float:
    """Smallest value at which the cumulative weight reaches half the total."""
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    order = np.argsort(values, kind="stable")
    cum = np.cumsum(weights[order])
    k = int(np.searchsorted(cum, 0.5 * cum[-1]))
    return float(values[order][min(k, len(values) - 1)])


def eigenstate_metrics(eig: EigenDecomposition) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Mean position, std width and IPR length of every eigenvector column."""
    dx = eig.grid.dx
    x = eig.grid.coords
    dens = np.abs(eig.eigenvectors) ** 2 * dx
    mass = np.sum(dens, axis=0)
    mean = (x @ dens) / mass
    widths = np.sqrt(np.sum((x[:, None] - mean[None, :]) ** 2 * dens, axis=0) / mass)
    iprs = dx / np.sum(dens**2, axis=0)
    return mean, widths, iprs


@dataclass(frozen=True)
class EigenstateRow:
    index: int
    eigenvalue: float
    x_mean: float
    width_std: float
    ipr_length: float
    block_fraction: float  # largest share of the state's mass inside one block


@dataclass(frozen=True, eq=False)
class LocalizationReport:
    rows: list[EigenstateRow]
    lambda_db: float
    d: Optional[float]
    effective_rank: float
    weight_fraction_below: float
    weighted_median_width: float
    partition: BlockPartition = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return len(self.partition.node_positions)

    @property
    def mean_node_spacing(self) -> Optional[float]:
        return self.partition.mean_spacing

    @property
    def pre_spreading(self) -> bool:
        """No interference nodes: the packet has not yet filled the box."""
        return self.n_nodes == 0

    def summary(self) -> dict:
        return {
            "lambda_db": self.lambda_db,
            "d": self.d,
            "effective_rank": self.effective_rank,
            "weight_fraction_below_lambda_db": self.weight_fraction_below,
            "weighted_median_width": self.weighted_median_width,
            "n_rows": len(self.rows),
            "n_nodes": self.n_nodes,
            "mean_node_spacing": self.mean_node_spacing,
            "min_block_fraction": min(r.block_fraction for r in self.rows),
            "regime": "pre-spreading" if self.pre_spreading else "interference",
        }


def localization_report(
    eig: EigenDecomposition,
    wf: WaveFunction,
    params: PhysicalParams,
    d: Optional[float],
    weight_cutoff: float = DEFAULT_WEIGHT_CUTOFF,
    rel_threshold: float = DEFAULT_REL_THRESHOLD,
) -> LocalizationReport:
    """Widths of the heaviest eigenstates against the de Broglie wavelength.

    Rows cover the leading eigenstates until ``weight_cutoff`` of the total
    spectral weight is reached. ``wf`` is the pure state the kernel was built
    from; its density supplies the node partition. ``d`` is recorded only
    (None when no decoherence was applied).
    """
    if not 0.0 < weight_cutoff <= 1.0:
        raise ValueError(f"weight_cutoff must lie in (0, 1], got {weight_cutoff!r}")
    grid = eig.grid
    lam = np.clip(eig.eigenvalues, 0.0, None)
    total = float(np.sum(lam))
    vecs = eig.eigenvectors
    dens = np.abs(vecs) ** 2 * grid.dx
    mean, widths, iprs = eigenstate_metrics(eig)

    lambda_db = de_broglie_wavelength(params)
    n_rows = int(np.searchsorted(np.cumsum(lam), weight_cutoff * total)) + 1
    n_rows = min(n_rows, len(lam))

    partition = find_nodes(density_profile(wf), grid, rel_threshold)
    rows = []
    for k in range(n_rows):
        rows.append(
            EigenstateRow(
                index=k,
                eigenvalue=float(eig.eigenvalues[k]),
                x_mean=float(mean[k]),
                width_std=float(widths[k]),
                ipr_length=float(iprs[k]),
                block_fraction=float(np.max(partition.block_masses(dens[:, k])) / np.sum(dens[:, k])),
            )
        )
    row_widths = [r.width_std for r in rows]
    return LocalizationReport(
        rows=rows,
        lambda_db=lambda_db,
        d=d,
        effective_rank=effective_rank(eig),
        weight_fraction_below=float(np.sum(lam[widths < lambda_db]) / total),
        weighted_median_width=weighted_median(row_widths, lam[:n_rows]),
        partition=partition,
    )
