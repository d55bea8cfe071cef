"""Spectrum persistence (delimited text + JSON metadata) and heatmap rendering."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from dqc_sim.signal import SpectrumGrid

COMPONENTS = {
    "real": lambda g: g.values.real,
    "imag": lambda g: g.values.imag,
    "magnitude": lambda g: g.magnitude,
}
METADATA_FILE = "metadata.json"


def _axis_record(values: np.ndarray) -> dict:
    return {"min": float(values[0]), "max": float(values[-1]), "count": int(values.shape[0])}


def _header(grid: SpectrumGrid, component: str) -> str:
    meta = grid.metadata
    lines = [
        f"dqc-sim spectrum component={component}",
        "units: frequencies in cm^-1; rows = Omega_2, columns = Omega_3",
        f"omega1_cm1: {grid.omega1!r}",
        "omega2_cm1: " + json.dumps(_axis_record(grid.omega2)),
        "omega3_cm1: " + json.dumps(_axis_record(grid.omega3)),
        f"config_sha256: {meta.get('config_sha256', 'none')}",
        "source: " + json.dumps(meta.get("source", {}), sort_keys=True),
    ]
    return "\n".join(lines)


def write_spectrum(grid: SpectrumGrid, directory, components=("real", "imag", "magnitude")) -> list[Path]:
    """Write one CSV matrix per component plus ``metadata.json``; returns the paths."""
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {directory}: {exc}") from exc
    written = []
    for comp in components:
        if comp not in COMPONENTS:
            raise ValueError(f"unknown component {comp!r}")
        path = directory / f"spectrum_{comp}.csv"
        try:
            np.savetxt(path, COMPONENTS[comp](grid), fmt="%.17g", delimiter=",",
                       header=_header(grid, comp), comments="# ")
        except OSError as exc:
            raise OSError(f"failed writing {path}: {exc}") from exc
        written.append(path)
    meta = {
        "omega1_cm1": grid.omega1,
        "omega2_cm1": grid.omega2.tolist(),
        "omega3_cm1": grid.omega3.tolist(),
        "components": list(components),
        "metadata": grid.metadata,
    }
    meta_path = directory / METADATA_FILE
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True))
    written.append(meta_path)
    return written


def read_spectrum(directory) -> SpectrumGrid:
    """Rebuild a grid written by ``write_spectrum`` (needs the real and imag components)."""
    directory = Path(directory)
    meta = json.loads((directory / METADATA_FILE).read_text())
    re = np.loadtxt(directory / "spectrum_real.csv", delimiter=",", ndmin=2)
    im = np.loadtxt(directory / "spectrum_imag.csv", delimiter=",", ndmin=2)
    values = re + 1j * im
    mag_path = directory / "spectrum_magnitude.csv"
    magnitude = np.loadtxt(mag_path, delimiter=",", ndmin=2) if mag_path.exists() else np.abs(values)
    return SpectrumGrid(
        omega1=meta["omega1_cm1"],
        omega2=np.array(meta["omega2_cm1"], dtype=float),
        omega3=np.array(meta["omega3_cm1"], dtype=float),
        values=values,
        magnitude=magnitude,
        metadata=meta["metadata"],
    )


def magnitude_rgba(grid: SpectrumGrid, palette: str = "viridis") -> np.ndarray:
    """Colour-mapped magnitude, linear from 0 to max; shape (n3, n2, 4), Omega_3 rows ascending."""
    from matplotlib import colormaps

    mag = grid.magnitude.T
    peak = mag.max()
    scaled = mag / peak if peak > 0 else np.zeros_like(mag)
    return colormaps[palette](scaled)


def render_heatmap(grid: SpectrumGrid, path, palette: str = "viridis") -> Path:
    """PNG heatmap of |S| over (Omega_2, Omega_3), ticks in 10^3 cm^-1."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if grid.magnitude.size == 0:
        raise ValueError("empty grid")
    path = Path(path)
    o2, o3 = grid.omega2 / 1e3, grid.omega3 / 1e3
    d2 = (o2[-1] - o2[0]) / max(len(o2) - 1, 1)
    d3 = (o3[-1] - o3[0]) / max(len(o3) - 1, 1)
    fig, ax = plt.subplots(figsize=(5, 4.2), dpi=120)
    ax.imshow(magnitude_rgba(grid, palette), origin="lower", aspect="auto", interpolation="nearest",
              extent=(o2[0] - d2 / 2, o2[-1] + d2 / 2, o3[0] - d3 / 2, o3[-1] + d3 / 2))
    peak = float(grid.magnitude.max())
    sm = plt.cm.ScalarMappable(cmap=palette, norm=plt.Normalize(0.0, peak if peak > 0 else 1.0))
    fig.colorbar(sm, ax=ax, label="|S|")
    ax.set_xlabel(r"$\tilde\Omega_2$ ($10^3$ cm$^{-1}$)")
    ax.set_ylabel(r"$\tilde\Omega_3$ ($10^3$ cm$^{-1}$)")
    ax.set_title(rf"$\Omega_1$ = {grid.omega1:.1f} cm$^{{-1}}$", fontsize=9)
    fig.tight_layout()
    try:
        fig.savefig(path, format="png", metadata={"Software": None})
    finally:
        plt.close(fig)
    return path
