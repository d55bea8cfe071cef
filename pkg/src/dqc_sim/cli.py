"""Command line entry point: ``dqc-sim {validate,diagonalize,spectrum,jsa}``.

Exit codes: 0 success, 2 validation error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from dqc_sim.config import ConfigError, RunConfig, dump_config, load_config
from dqc_sim.io import render_heatmap, write_spectrum
from dqc_sim.model import ValidationError
from dqc_sim.photonics import SpdcSource, jsa_matrix, schmidt_values
from dqc_sim.pipeline import PipelineError, manifold_diagnostics, prepare, run_job

log = logging.getLogger("dqc_sim")

EXIT_OK, EXIT_RUNTIME, EXIT_VALIDATION = 0, 1, 2


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", required=True, help="run configuration (YAML)")
    parser.add_argument("--out", default=None, help="output directory (overrides output.directory)")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for grid evaluation")
    parser.add_argument("--no-normalize", action="store_true", help="keep raw signal scale")
    parser.add_argument("--overtone-variant", default=None,
                        help="named overtone-nonlinearity set from aggregate.overtone_variants_cm1")
    parser.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dqc-sim", description="Double-quantum-coherence spectra of exciton aggregates")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("validate", help="load and validate a config; print its canonical form")
    _common(p)
    p = sub.add_parser("diagonalize", help="print manifold diagnostics")
    _common(p)
    p = sub.add_parser("spectrum", help="compute and write the 2D spectrum")
    _common(p)
    p.add_argument("--render", action="store_true", help="also write a PNG heatmap")
    p = sub.add_parser("jsa", help="JSA singular values and grid dump for an SPDC source")
    _common(p)
    return ap


def _out_dir(args, cfg: RunConfig) -> Path:
    return Path(args.out if args.out is not None else cfg.output.directory)


def cmd_validate(args, cfg: RunConfig) -> int:
    print(f"# config OK: {cfg.aggregate.n_sites} sites, sha256={cfg.content_hash}")
    print(dump_config(cfg), end="")
    return EXIT_OK


def cmd_diagonalize(args, cfg: RunConfig) -> int:
    basis, res, _ = prepare(cfg)
    diag = manifold_diagnostics(basis, res)
    print(f"N_s={diag['n_sites']} N_e={diag['n_e']} N_f={diag['n_f']} "
          f"(overtone {diag['n_overtone']}, combination {diag['n_combination']})")
    print("top |d_eg|: " + ", ".join(f"{d['state']}={d['abs_dipole']:.4f}" for d in diag["top_dip_ge"]))
    print("gamma_e range (cm^-1): {:.3f} .. {:.3f}".format(*diag["gamma_e_range_cm1"]))
    print("gamma_f range (cm^-1): {:.3f} .. {:.3f}".format(*diag["gamma_f_range_cm1"]))
    for i, e in enumerate(basis.one_exciton_energies, 1):
        print(f"e{i:02d} {e:12.3f}  d_eg={basis.dip_ge[i - 1]: .5f}  gamma={res.gamma_e[i - 1]:.3f}")
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "diagnostics.json").write_text(json.dumps(diag, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_spectrum(args, cfg: RunConfig) -> int:
    grid, diag = run_job(cfg, threads=args.threads, normalize=False if args.no_normalize else None)
    out = _out_dir(args, cfg)
    paths = write_spectrum(grid, out, cfg.output.components)
    (out / "diagnostics.json").write_text(json.dumps(diag, indent=2, sort_keys=True))
    if args.render or cfg.output.render:
        paths.append(render_heatmap(grid, out / "spectrum.png", cfg.output.palette))
    print(f"N_e={diag['n_e']} N_f={diag['n_f']} omega1={grid.omega1:.3f} cm^-1 "
          f"peak |S|={grid.metadata['raw_peak_magnitude']:.6e}")
    if "jsa_singular_values" in diag:
        sv = np.array(diag["jsa_singular_values"])
        print(f"JSA: {np.sum(sv > 1e-2)} singular values > 1e-2; leading {sv[:5].round(4).tolist()}")
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def cmd_jsa(args, cfg: RunConfig) -> int:
    basis, _, source = prepare(cfg)
    if not isinstance(source, SpdcSource):
        raise ConfigError("source.kind", "the jsa command needs an spdc source")
    wa, wb, f = jsa_matrix(source, cfg.jsa)
    sv_all = schmidt_values(f, wa, wb)
    sv = sv_all if cfg.jsa.n_values is None else sv_all[:cfg.jsa.n_values]
    out = _out_dir(args, cfg)
    out.mkdir(parents=True, exist_ok=True)
    header = (f"joint spectral intensity |f|^2; rows omega_a {wa[0]!r}..{wa[-1]!r} cm^-1 ({wa.size}), "
              f"cols omega_b {wb[0]!r}..{wb[-1]!r} cm^-1 ({wb.size})")
    np.savetxt(out / "jsi.csv", np.abs(f) ** 2, fmt="%.17g", delimiter=",", header=header)
    np.savetxt(out / "jsa_singular_values.csv", sv, fmt="%.17g", header="normalized singular values")
    print(f"T_ent={source.entanglement_time} fs, grid {wa.size}x{wb.size}")
    print(f"Schmidt number K=1/sum(s^4)={1.0 / np.sum(sv_all ** 4):.4f}; "
          f"{np.sum(sv_all > 1e-2)} values > 1e-2")
    for i, s in enumerate(sv, 1):
        print(f"{i:3d} {s:.6e}")
    return EXIT_OK


COMMANDS = {"validate": cmd_validate, "diagonalize": cmd_diagonalize, "spectrum": cmd_spectrum, "jsa": cmd_jsa}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        cfg = load_config(args.config, overtone_variant=args.overtone_variant)
        return COMMANDS[args.command](args, cfg)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ConfigError, ValidationError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except PipelineError as exc:
        if isinstance(exc.cause, (ConfigError, ValidationError)):
            print(f"validation error: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001
        log.debug("unhandled", exc_info=True)
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
