"""
End-to-end runs: packet -> free evolution -> decoherence -> eigensolve -> analysis.

Each run writes into its output directory:

    profile.csv    x, re_psi, im_psi, abs2
    spectrum.csv   k, lambda, width_std, ipr_length, x_mean   (all eigenstates)
    report.csv     k, lambda, x_mean, width_std, ipr_length, block_fraction
                   (eigenstates carrying weight_cutoff of the trace)
    blocks.csv     node_x
    eigvec_<k>.csv x, re_v, im_v   for k < dump_top_k
    manifest.json  config echo, derived scalars, file list, stage timings

Numbers are written with 17 significant digits so files round-trip exactly.
"""

from __future__ import annotations

import json
import logging
import math
import time
from contextlib import contextmanager
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import analysis, decoherence, lattice, propagator, spectra
from .config import SWEEPABLE, SimConfig, coerce_value
from .errors import BoxDecoherenceError, ConfigError

log = logging.getLogger(__name__)

REVERSAL_TOLERANCE = 1e-9
FLOAT_FMT = "%.17g"


@dataclass
class RunManifest:
    config: dict
    derived: dict
    report: dict
    files: list[str] = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    output_dir: Optional[str] = None

    def to_json(self) -> str:
        return json.dumps(
            {
                "config": self.config,
                "derived": self.derived,
                "report": self.report,
                "files": self.files,
                "timings_s": self.timings,
            },
            indent=2,
            sort_keys=False,
        )


class _Stopwatch:
    def __init__(self):
        self.timings = {}

    @contextmanager
    def stage(self, name):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = time.perf_counter() - t0


def _write_csv(path: Path, header: Sequence[str], columns: Sequence[np.ndarray], int_cols=()) -> None:
    fmt = ["%d" if i in int_cols else FLOAT_FMT for i in range(len(header))]
    data = np.column_stack(columns) if len(columns[0]) else np.empty((0, len(header)))
    np.savetxt(path, data, fmt=fmt, delimiter=",", header=",".join(header), comments="")


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def run_pipeline(cfg: SimConfig, output_dir: Optional[str | Path] = None) -> RunManifest:
    """Execute one full run and write its files.

    ``output_dir`` overrides ``cfg.output_dir``. With ``cfg.reversal_check``
    a reversal fidelity below 1 - 1e-9 aborts the run; the fidelity is
    recorded either way.
    """
    out = Path(output_dir if output_dir is not None else cfg.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc

    clock = _Stopwatch()
    grid = cfg.grid()
    params = cfg.params

    with clock.stage("packet"):
        psi0 = lattice.gaussian_packet(grid, params)
    with clock.stage("evolve"):
        psi = propagator.evolve(psi0, cfg.t, params)
    with clock.stage("reversal"):
        rev = propagator.reversal_fidelity(psi0, cfg.t, params)
    if cfg.reversal_check and rev < 1.0 - REVERSAL_TOLERANCE:
        raise BoxDecoherenceError(f"reversal fidelity {rev!r} below 1 - {REVERSAL_TOLERANCE:g}")

    with clock.stage("density"):
        rho = decoherence.pure_density(psi)
        d = None if cfg.no_decoherence else cfg.d
        if d is not None:
            rho = decoherence.apply_decoherence(rho, d)
        tr = decoherence.trace(rho)
        pur = decoherence.purity(rho)
    with clock.stage("eigh"):
        eig = spectra.eigh(rho)
    del rho
    with clock.stage("analysis"):
        report = analysis.localization_report(
            eig, psi, params, d, weight_cutoff=cfg.weight_cutoff, rel_threshold=cfg.rel_threshold
        )
        x_mean, widths, iprs = analysis.eigenstate_metrics(eig)

    files = []
    with clock.stage("write"):
        x = grid.coords
        k_all = np.arange(len(eig))

        _write_csv(out / "profile.csv", ["x", "re_psi", "im_psi", "abs2"],
                   [x, psi.amps.real, psi.amps.imag, analysis.density_profile(psi)])
        _write_csv(out / "spectrum.csv", ["k", "lambda", "width_std", "ipr_length", "x_mean"],
                   [k_all, eig.eigenvalues, widths, iprs, x_mean], int_cols=(0,))
        rows = report.rows
        _write_csv(out / "report.csv",
                   ["k", "lambda", "x_mean", "width_std", "ipr_length", "block_fraction"],
                   [np.array([r.index for r in rows]),
                    np.array([r.eigenvalue for r in rows]),
                    np.array([r.x_mean for r in rows]),
                    np.array([r.width_std for r in rows]),
                    np.array([r.ipr_length for r in rows]),
                    np.array([r.block_fraction for r in rows])], int_cols=(0,))
        _write_csv(out / "blocks.csv", ["node_x"], [report.partition.node_positions])
        files += ["profile.csv", "spectrum.csv", "report.csv", "blocks.csv"]
        for k in range(cfg.dump_top_k):
            v = eig.eigenvectors[:, k]
            name = f"eigvec_{k}.csv"
            _write_csv(out / name, ["x", "re_v", "im_v"], [x, v.real, v.imag])
            files.append(name)

    derived = {
        "lambda_db": report.lambda_db,
        "dx": grid.dx,
        "tail_mass": lattice.tail_mass(grid.length, params),
        "trace": tr,
        "purity": pur,
        "effective_rank": report.effective_rank,
        "reversal_fidelity": rev,
        "eigenvalue_sum": float(np.sum(eig.eigenvalues)),
        "eigenvalue_square_sum": float(np.sum(eig.eigenvalues**2)),
        "min_eigenvalue": float(eig.eigenvalues[-1]),
        "max_eigenvalue": float(eig.eigenvalues[0]),
        "kernel_mib": decoherence.kernel_bytes(grid.n_points) / 2**20,
    }
    manifest = RunManifest(
        config=cfg.as_dict(),
        derived=derived,
        report={k: _json_safe(v) for k, v in report.summary().items()},
        files=files + ["manifest.json"],
        timings=clock.timings,
        output_dir=str(out),
    )
    (out / "manifest.json").write_text(manifest.to_json() + "\n")
    log.info("run finished in %s: %s", out, {k: round(v, 3) for k, v in clock.timings.items()})
    return manifest


def _sweep_dirname(axis: str, value) -> str:
    return f"{axis}={value!r}"


def _sweep_item(cfg: SimConfig, axis: str, value, out: Path):
    try:
        item_cfg = cfg.replace(**{axis: coerce_value(axis, value)})
        return run_pipeline(item_cfg, out), None
    except (BoxDecoherenceError, ValueError, OSError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


@dataclass
class SweepResult:
    axis: str
    values: list
    manifests: list  # RunManifest or None per value
    errors: list  # None or error text per value

    @property
    def ok(self) -> bool:
        return all(e is None for e in self.errors)


def sweep(
    cfg: SimConfig,
    axis: str,
    values: Sequence[float],
    output_dir: Optional[str | Path] = None,
    jobs: int = 1,
) -> SweepResult:
    """Run the pipeline once per value of ``axis``, each in its own sub-directory.

    Failures are recorded and the sweep moves on. ``sweep_summary.csv`` in
    the parent directory lists value, effective rank and the weight fraction
    of eigenstates narrower than the de Broglie wavelength, in input order.
    """
    if axis not in SWEEPABLE:
        raise ConfigError(f"axis {axis!r} is not sweepable; choose one of {', '.join(SWEEPABLE)}")
    root = Path(output_dir if output_dir is not None else cfg.output_dir)
    root.mkdir(parents=True, exist_ok=True)
    values = list(values)
    dirs = [root / _sweep_dirname(axis, v) for v in values]

    if jobs > 1 and len(values) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_item, [cfg] * len(values), [axis] * len(values), values, dirs))
    else:
        results = [_sweep_item(cfg, axis, v, p) for v, p in zip(values, dirs)]

    manifests = [m for m, _ in results]
    errors = [e for _, e in results]
    lines = [f"{axis},effective_rank,weight_fraction_below_lambda_db,status"]
    for v, m, e in zip(values, manifests, errors):
        if m is None:
            lines.append(f"{v!r},,,{json.dumps(e)}")
            log.warning("sweep item %s=%r failed: %s", axis, v, e)
        else:
            rank = FLOAT_FMT % m.derived["effective_rank"]
            frac = FLOAT_FMT % m.report["weight_fraction_below_lambda_db"]
            lines.append(f"{v!r},{rank},{frac},ok")
    (root / "sweep_summary.csv").write_text("\n".join(lines) + "\n")
    return SweepResult(axis, values, manifests, errors)
