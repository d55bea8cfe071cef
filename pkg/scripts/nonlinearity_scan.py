"""Peak DQC magnitude of the bundled dimer as the exciton nonlinearities are scaled to zero.

With equal dephasing for every coherence the two pathways cancel exactly in the
harmonic limit; state-resolved phonon dephasing leaves a finite residual.

    python scripts/nonlinearity_scan.py [--csv scan.csv]
"""

import argparse

import numpy as np

from dqc_sim.bath import resonance_table, uniform_resonance_table
from dqc_sim.config import bundled_config, load_config
from dqc_sim.model import diagonalize_manifolds
from dqc_sim.photonics import ClassicalPulseSet
from dqc_sim.signal import SpectrumJob, spectrum_2d


def peak(cfg, scale, dephasing):
    agg = cfg.aggregate
    spec = agg.with_changes(overtone_nonlinearity=scale * agg.overtone_nonlinearity,
                            combination_nonlinearity=scale * agg.combination_nonlinearity)
    basis = diagonalize_manifolds(spec)
    res = resonance_table(basis, cfg.bath) if dephasing is None else uniform_resonance_table(basis, dephasing)
    job = SpectrumJob(cfg.job.omega2, cfg.job.omega3, ClassicalPulseSet.identical(15150.0, 10.0), basis, res,
                      normalize=False)
    return float(spectrum_2d(job).magnitude.max())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--csv", default=None)
    ap.add_argument("--uniform", type=float, default=40.0, help="equal dephasing rate, cm^-1")
    args = ap.parse_args()
    cfg = load_config(bundled_config("dimer"))
    scales = np.array([1.0, 0.75, 0.5, 0.25, 0.1, 0.03, 0.01, 0.0])
    rows = np.array([[s, peak(cfg, s, args.uniform), peak(cfg, s, None)] for s in scales])
    rows[:, 1] /= rows[0, 1]
    rows[:, 2] /= rows[0, 2]
    print(f"{'scale':>7s} {'equal Gamma':>12s} {'phonon Gamma':>13s}")
    for s, a, b in rows:
        print(f"{s:7.2f} {a:12.3e} {b:13.3e}")
    if args.csv:
        np.savetxt(args.csv, rows, delimiter=",", header="scale,equal_dephasing,phonon_dephasing", fmt="%.10g")


if __name__ == "__main__":
    main()
