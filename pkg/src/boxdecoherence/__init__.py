"""Gaussian wave packet between infinite walls, Gaussian decoherence, and
localization of the reduced density matrix eigenstates."""

from .analysis import (
    BlockPartition,
    LocalizationReport,
    de_broglie_wavelength,
    density_profile,
    eigenstate_width,
    find_nodes,
    ipr_length,
    localization_report,
)
from .config import SimConfig, load_config
from .decoherence import DensityMatrix, apply_decoherence, off_block_mass, pure_density, purity, trace
from .errors import (
    BoxDecoherenceError,
    ConfigError,
    GridMismatchError,
    InvalidPartitionError,
    NoConvergenceError,
    NonHermitianError,
    TailLeakError,
)
from .lattice import Grid, PhysicalParams, WaveFunction, fidelity, gaussian_packet, make_grid, norm2
from .pipeline import RunManifest, run_pipeline, sweep
from .propagator import (
    SpectralCoeffs,
    evolve,
    from_spectral,
    mode_energy,
    reversal_fidelity,
    to_spectral,
)
from .spectra import EigenDecomposition, effective_rank, eigh

__version__ = "0.1.0"
