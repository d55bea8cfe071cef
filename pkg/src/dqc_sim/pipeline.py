"""Orchestration: diagonalize -> dephasing -> resonances -> spectrum."""

from __future__ import annotations

from dataclasses import asdict

import numpy as np

from dqc_sim.bath import ResonanceTable, resonance_table, uniform_resonance_table
from dqc_sim.config import RunConfig, resolve_frequency
from dqc_sim.model import ExcitonBasis, diagonalize_manifolds
from dqc_sim.photonics import ClassicalPulseSet, SpdcSource, jsa_singular_values
from dqc_sim.signal import SpectrumGrid, SpectrumJob, spectrum_2d


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


def source_parameters(source) -> dict:
    if isinstance(source, SpdcSource):
        return {"kind": "spdc", **asdict(source), "entanglement_time_fs": source.entanglement_time}
    if isinstance(source, ClassicalPulseSet):
        return {"kind": "classical", "transform_limited": source.transform_limited,
                "pulses": [asdict(p) for p in source.pulses]}
    raise TypeError(type(source).__name__)


class _Stage:
    def __init__(self, name):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and not isinstance(exc, PipelineError) and isinstance(exc, Exception):
            raise PipelineError(self.name, exc) from exc
        return False


def prepare(config: RunConfig):
    """Basis, resonances and the concrete photon source for a config."""
    with _Stage("diagonalize"):
        basis = diagonalize_manifolds(config.aggregate)
    with _Stage("resonances"):
        if config.dephasing.model == "uniform":
            res = uniform_resonance_table(basis, config.dephasing.uniform)
        else:
            res = resonance_table(basis, config.bath, lamb_shift=config.dephasing.lamb_shift,
                                  rule=config.dephasing.two_exciton_rule)
    with _Stage("source"):
        source = config.source.build(basis)
    return basis, res, source


def manifold_diagnostics(basis: ExcitonBasis, res: ResonanceTable) -> dict:
    n = basis.n_e
    order = np.argsort(-np.abs(basis.dip_ge), kind="stable")[:10]
    return {
        "n_sites": n,
        "n_e": n,
        "n_f": basis.n_f,
        "n_overtone": sum(p.is_overtone for p in basis.pairs),
        "n_combination": sum(not p.is_overtone for p in basis.pairs),
        "one_exciton_energies_cm1": basis.one_exciton_energies.tolist(),
        "two_exciton_energies_cm1": basis.two_exciton_energies.tolist(),
        "top_dip_ge": [{"state": f"e{int(i) + 1}", "abs_dipole": float(abs(basis.dip_ge[i]))} for i in order],
        "gamma_e_range_cm1": [float(res.gamma_e.min()), float(res.gamma_e.max())],
        "gamma_f_range_cm1": [float(res.gamma_f.min()), float(res.gamma_f.max())],
    }


def run_job(config: RunConfig, threads: int = 1, normalize: bool | None = None):
    """Run the full pipeline; returns (SpectrumGrid, diagnostics)."""
    basis, res, source = prepare(config)
    diagnostics = manifold_diagnostics(basis, res)
    if isinstance(source, SpdcSource):
        with _Stage("jsa"):
            sv = jsa_singular_values(source, config.jsa)
            diagnostics["jsa_singular_values"] = sv.tolist()
            # share of the Schmidt weight held by the reported values (1 when untruncated)
            diagnostics["jsa_weight_captured"] = float(np.sum(sv ** 2))
    js = config.job
    with _Stage("spectrum"):
        omega1 = None if js.omega1 is None else resolve_frequency(js.omega1, basis)
        job = SpectrumJob(
            omega2_axis=js.omega2, omega3_axis=js.omega3, source=source, basis=basis, resonances=res,
            omega1=omega1, normalize=js.normalize if normalize is None else normalize,
            pathway_filter=js.pathway_filter, abs_gap_frequencies=js.abs_gap_frequencies, s0=js.scale,
        )
        grid = spectrum_2d(job, threads=threads)
    grid.metadata.update({
        "config_sha256": config.content_hash,
        "source": source_parameters(source),
        "n_e": basis.n_e,
        "n_f": basis.n_f,
    })
    diagnostics["omega1_cm1"] = grid.omega1
    return grid, diagnostics
