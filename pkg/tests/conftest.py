import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from boxdecoherence import analysis, decoherence, lattice, propagator, spectra  # noqa: E402

PAPER = lattice.PhysicalParams(hbar=1.0, mass=1.0, p0=30.0, q0=0.5, sigma=0.05)
PAPER_T = 0.5
PAPER_D = 0.01

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@dataclass
class Run:
    grid: lattice.Grid
    psi0: lattice.WaveFunction
    psi: lattice.WaveFunction
    pure: decoherence.DensityMatrix
    rho: decoherence.DensityMatrix
    eig: spectra.EigenDecomposition
    report: analysis.LocalizationReport


def make_run(n_points, t=PAPER_T, d=PAPER_D, params=PAPER):
    grid = lattice.make_grid(n_points, 1.0)
    psi0 = lattice.gaussian_packet(grid, params)
    psi = propagator.evolve(psi0, t, params)
    pure = decoherence.pure_density(psi)
    rho = decoherence.apply_decoherence(pure, d)
    eig = spectra.eigh(rho)
    report = analysis.localization_report(eig, psi, params, d, weight_cutoff=0.9)
    return Run(grid, psi0, psi, pure, rho, eig, report)


@pytest.fixture(scope="session")
def paper_run():
    return make_run(2048)


@pytest.fixture(scope="session")
def paper_run_1024():
    return make_run(1024)


@pytest.fixture(scope="session")
def t0_run():
    return make_run(2048, t=0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def grid_small():
    return lattice.make_grid(256, 1.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
