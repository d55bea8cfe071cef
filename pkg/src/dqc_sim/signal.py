"""Double-quantum-coherence signal as a sum over (f, e', e) excited-state-absorption pathways.

Pathway 1 ends on the e'-g coherence, pathway 2 on the f-e' coherence. They enter
with opposite signs, so they cancel when the two-exciton manifold is harmonic.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from dqc_sim.bath import ResonanceTable
from dqc_sim.model import ExcitonBasis, ValidationError
from dqc_sim.photonics import PhotonSource, four_point

PathwayFilter = Literal["both", "pathway1", "pathway2"]
PATHWAY_FILTERS = ("both", "pathway1", "pathway2")
# relative sign of the two ESA pathways (pathway 2 carries one extra bra-side interaction)
PATHWAY_SIGNS = (1.0, -1.0)


@dataclass(frozen=True)
class Axis:
    min: float
    max: float
    count: int

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 2:
            raise ValidationError("count", f"grid needs at least 2 points, got {self.count}")
        if not self.max > self.min:
            raise ValidationError("max", f"max ({self.max}) must exceed min ({self.min})")

    def values(self) -> NDArray[np.float64]:
        return np.linspace(self.min, self.max, int(self.count))

    @property
    def step(self) -> float:
        return (self.max - self.min) / (self.count - 1)


@dataclass(frozen=True)
class SpectrumJob:
    omega2_axis: Axis
    omega3_axis: Axis
    source: PhotonSource
    basis: ExcitonBasis
    resonances: ResonanceTable
    omega1: float | None = None
    normalize: bool = True
    pathway_filter: PathwayFilter = "both"
    abs_gap_frequencies: bool = True
    s0: float = 1.0

    def __post_init__(self):
        if self.pathway_filter not in PATHWAY_FILTERS:
            raise ValidationError("pathway_filter", f"must be one of {PATHWAY_FILTERS}")

    @property
    def resolved_omega1(self) -> float:
        """Fixed Omega_1; defaults to the brightest one-exciton resonance."""
        if self.omega1 is not None:
            return float(self.omega1)
        bright = int(np.argmax(self.basis.dip_ge ** 2))
        return float(self.resonances.z_eg[bright].real)


@dataclass
class SpectrumGrid:
    omega1: float
    omega2: NDArray[np.float64]
    omega3: NDArray[np.float64]
    values: NDArray[np.complex128]  # shape (len(omega2), len(omega3))
    magnitude: NDArray[np.float64]
    metadata: dict = field(default_factory=dict)


def pathway_weights(f: int, e_prime: int, e: int, basis: ExcitonBasis) -> tuple[float, float]:
    """Dipole products of the two pathways. Real dipoles make them equal."""
    for name, idx, size in (("f", f, basis.n_f), ("e_prime", e_prime, basis.n_e), ("e", e, basis.n_e)):
        if not 0 <= idx < size:
            raise IndexError(f"{name}={idx} out of range [0, {size})")
    d_fe, d_eg = basis.dip_ef, basis.dip_ge
    w1 = d_fe[f, e_prime] * d_eg[e_prime] * d_fe[f, e] * d_eg[e]
    w2 = d_eg[e_prime] * d_fe[f, e_prime] * d_fe[f, e] * d_eg[e]
    return float(w1), float(w2)


def weight_tensor(basis: ExcitonBasis) -> NDArray[np.float64]:
    """W[f, e', e] = d_{e'f} d_{e'g} d_{fe} d_{eg}."""
    a = basis.dip_ef * basis.dip_ge[None, :]
    return a[:, :, None] * a[:, None, :]


def resonance_denominator(o3, o2, o1, zc, zb, za):
    for z in (zc, zb, za):
        if np.any(np.imag(z) <= 0):
            raise ValueError("resonances need strictly positive dephasing")
    return (np.asarray(o3) - zc) * (np.asarray(o2) - zb) * (np.asarray(o1) - za)


def correlator_tensors(source: PhotonSource, resonances: ResonanceTable,
                       abs_gap_frequencies: bool = True):
    """Four-point correlators of both pathways on the (f, e', e) grid.

    Field slots follow (E4^+, E3^+, E2, E1) = (w_e'f, w_e'g, w_fe, w_eg) for pathway 1
    and (w_ge', w_e'f, w_fe, w_eg) for pathway 2, evaluated at bare gap frequencies.
    """
    w_eg = resonances.z_eg.real
    w_fe = resonances.z_fe.real
    nf, ne = w_fe.shape
    shape = (nf, ne, ne)
    w_fep = np.broadcast_to(w_fe[:, :, None], shape)  # w_{f e'}
    w_epg = np.broadcast_to(w_eg[None, :, None], shape)  # w_{e' g}
    w_fe3 = np.broadcast_to(w_fe[:, None, :], shape)  # w_{f e}
    w_eg3 = np.broadcast_to(w_eg[None, None, :], shape)  # w_{e g}
    slots1 = (-w_fep, w_epg, w_fe3, w_eg3)
    slots2 = (-w_epg, -w_fep, w_fe3, w_eg3)
    if abs_gap_frequencies:
        slots1 = tuple(np.abs(s) for s in slots1)
        slots2 = tuple(np.abs(s) for s in slots2)
    return four_point(*slots1, source), four_point(*slots2, source)


def _pathway_amplitudes(job: SpectrumJob, o1: float):
    w = weight_tensor(job.basis)
    c1, c2 = correlator_tensors(job.source, job.resonances, job.abs_gap_frequencies)
    g1 = 1.0 / (o1 - job.resonances.z_eg)
    a1 = PATHWAY_SIGNS[0] * np.sum(w * c1 * g1[None, None, :], axis=2)
    a2 = PATHWAY_SIGNS[1] * np.sum(w * c2 * g1[None, None, :], axis=2)
    if job.pathway_filter == "pathway1":
        a2 = np.zeros_like(a2)
    elif job.pathway_filter == "pathway2":
        a1 = np.zeros_like(a1)
    return a1, a2


def signal_point(o3: float, o2: float, o1: float, job: SpectrumJob) -> complex:
    """Direct sum over every (f, e', e) term at one frequency triple."""
    res = job.resonances
    w = weight_tensor(job.basis)
    c1, c2 = correlator_tensors(job.source, res, job.abs_gap_frequencies)
    common = (o2 - res.z_fg)[:, None, None] * (o1 - res.z_eg)[None, None, :]
    f1 = (o3 - res.z_eg)[None, :, None] * common
    f2 = (o3 - res.z_fe)[:, :, None] * common
    terms = []
    if job.pathway_filter in ("both", "pathway1"):
        terms.append((PATHWAY_SIGNS[0] * w * c1 / f1).ravel())
    if job.pathway_filter in ("both", "pathway2"):
        terms.append((PATHWAY_SIGNS[1] * w * c2 / f2).ravel())
    t = np.concatenate(terms)
    return job.s0 * complex(math.fsum(t.real), math.fsum(t.imag))


class _CompensatedSum:
    """Neumaier summation over a stream of equally shaped complex arrays."""

    def __init__(self, shape):
        self._s = [np.zeros(shape), np.zeros(shape)]
        self._c = [np.zeros(shape), np.zeros(shape)]

    def add(self, x):
        for k, part in enumerate((x.real, x.imag)):
            s = self._s[k]
            t = s + part
            self._c[k] += np.where(np.abs(s) >= np.abs(part), (s - t) + part, (part - t) + s)
            self._s[k] = t

    def total(self):
        return (self._s[0] + self._c[0]) + 1j * (self._s[1] + self._c[1])


def _omega3_profiles(job: SpectrumJob, a1, a2, o3: NDArray) -> NDArray[np.complex128]:
    # M[f, i3] = sum_e' A1[f,e'] / (o3 - z_e'g) + A2[f,e'] / (o3 - z_fe')
    res = job.resonances
    acc = _CompensatedSum((job.basis.n_f, o3.shape[0]))
    for ep in range(job.basis.n_e):
        acc.add(a1[:, ep, None] / (o3[None, :] - res.z_eg[ep])
                + a2[:, ep, None] / (o3[None, :] - res.z_fe[:, ep, None]))
    return acc.total()


def _rows(profiles, z_fg, o2_block):
    acc = _CompensatedSum((o2_block.shape[0], profiles.shape[1]))
    for f in range(z_fg.shape[0]):
        acc.add((1.0 / (o2_block - z_fg[f]))[:, None] * profiles[f][None, :])
    return acc.total()


def spectrum_2d(job: SpectrumJob, threads: int = 1, block: int = 16) -> SpectrumGrid:
    """Evaluate the signal on the Omega_2 x Omega_3 grid at fixed Omega_1.

    Each grid value is accumulated over states in a fixed order, so the result does
    not depend on ``threads`` or ``block``.
    """
    o1 = job.resolved_omega1
    o2 = job.omega2_axis.values()
    o3 = job.omega3_axis.values()
    for z in (job.resonances.z_eg, job.resonances.z_fg, job.resonances.z_fe):
        if np.any(z.imag <= 0):
            raise ValueError("resonances need strictly positive dephasing")
    a1, a2 = _pathway_amplitudes(job, o1)
    profiles = _omega3_profiles(job, a1, a2, o3)
    starts = range(0, o2.shape[0], block)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda s: _rows(profiles, job.resonances.z_fg, o2[s:s + block]), starts))
    else:
        chunks = [_rows(profiles, job.resonances.z_fg, o2[s:s + block]) for s in starts]
    values = job.s0 * np.concatenate(chunks, axis=0)
    magnitude = np.abs(values)
    peak = float(magnitude.max())
    if job.normalize and peak > 0:
        values = values / peak
        magnitude = magnitude / peak
    meta = {
        "omega1_cm1": o1,
        "s0": job.s0,
        "raw_peak_magnitude": peak,
        "normalized": bool(job.normalize and peak > 0),
        "pathway_filter": job.pathway_filter,
        "abs_gap_frequencies": job.abs_gap_frequencies,
    }
    return SpectrumGrid(o1, o2, o3, values, magnitude, meta)
