"""Phonon bath: spectral density, thermal correlation spectrum, dephasing rates and resonances."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray
from scipy import integrate, interpolate

from dqc_sim.model import ExcitonBasis, ValidationError
from dqc_sim.units import thermal_energy


class QuadratureError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (error estimate {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class BrownianMode:
    reorganization: float
    frequency: float
    damping: float


@dataclass(frozen=True)
class BathSpec:
    """One overdamped (Drude) term plus underdamped Brownian modes; cm^-1 and K."""

    lambda0: float
    gamma0: float
    modes: tuple[BrownianMode, ...] = ()
    temperature: float = 273.0

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(
            m if isinstance(m, BrownianMode) else BrownianMode(*m) for m in self.modes))
        for name in ("lambda0", "gamma0", "temperature"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValidationError(name, f"must be strictly positive, got {value}")
        for i, m in enumerate(self.modes):
            for name in ("reorganization", "frequency", "damping"):
                value = getattr(m, name)
                if not (np.isfinite(value) and value > 0):
                    raise ValidationError(f"modes[{i}].{name}", f"must be strictly positive, got {value}")

    @property
    def beta(self) -> float:
        return 1.0 / thermal_energy(self.temperature)

    def _mode_arrays(self):
        lam = np.array([m.reorganization for m in self.modes])
        w = np.array([m.frequency for m in self.modes])
        g = np.array([m.damping for m in self.modes])
        return lam, w, g


def _density_over_omega(omega, bath: BathSpec):
    # J(w)/w, even and regular at w = 0
    omega = np.asarray(omega, dtype=float)
    w2 = omega ** 2
    out = 2.0 * bath.lambda0 * bath.gamma0 / (w2 + bath.gamma0 ** 2)
    if bath.modes:
        lam, wj, gj = bath._mode_arrays()
        w2e = w2[..., None]
        out = out + np.sum(2.0 * lam * wj ** 2 * gj / ((wj ** 2 - w2e) ** 2 + w2e * gj ** 2), axis=-1)
    return out


def spectral_density(omega, bath: BathSpec):
    """Drude term plus Brownian oscillators, odd in omega."""
    omega = np.asarray(omega, dtype=float)
    return omega * _density_over_omega(omega, bath)


def _bose_factor_times_omega(omega, beta):
    # w (n(w) + 1) = w / (1 - exp(-beta w)), -> 1/beta at w = 0
    omega = np.asarray(omega, dtype=float)
    x = beta * omega
    small = np.abs(x) < 1e-8
    safe = np.where(small, 1.0, x)
    val = np.where(small, 1.0 + 0.5 * x, safe / -np.expm1(-safe))
    return val / beta


def correlation_spectrum_real(gap, bath: BathSpec):
    """Re C(gap) = J(gap) (n(gap) + 1): uphill gaps are Boltzmann-suppressed."""
    return _density_over_omega(gap, bath) * _bose_factor_times_omega(gap, bath.beta)


def _full_spectrum(omega, bath):
    return 2.0 * correlation_spectrum_real(omega, bath)


def correlation_spectrum_imag(gap: float, bath: BathSpec, tol: float = 1e-9) -> float:
    """Principal-value part, -(1/2pi) PV int S(w) / (w - gap) dw with S = 2 Re C."""
    widths = [bath.gamma0] + [m.frequency + m.damping for m in bath.modes]
    width = max(widths + [1.0 / bath.beta])
    half = 20.0 * width + abs(gap)
    lo, hi = gap - half, gap + half
    f = lambda w: _full_spectrum(w, bath)
    result, total_err = integrate.quad(f, lo, hi, weight="cauchy", wvar=gap, limit=500,
                                       epsrel=tol)
    for a, b in ((-np.inf, lo), (hi, np.inf)):
        val, err = integrate.quad(lambda w: f(w) / (w - gap), a, b, limit=500, epsrel=tol)
        result += val
        total_err += err
    if not np.isfinite(result) or total_err > max(1e-6, 1e-4 * abs(result)):
        raise QuadratureError("principal-value quadrature did not converge", total_err)
    return -result / (2.0 * np.pi)


def bath_correlation_spectrum(gap, bath: BathSpec, imaginary: bool = False):
    """Thermally weighted bath spectrum C(gap).

    Returns the real part as an array unless ``imaginary`` is set, in which case a
    complex value including the principal-value part is computed per gap.
    """
    re = np.asarray(correlation_spectrum_real(gap, bath))
    if not imaginary:
        return re
    return re + 1j * _imag_on_gaps(np.asarray(gap, dtype=float), bath)


def _imag_on_gaps(gaps, bath, direct_limit=64, nodes=513):
    # many gaps (two-exciton manifolds) go through a cubic spline of the PV integral
    flat = gaps.ravel()
    if flat.size <= direct_limit:
        im = np.array([correlation_spectrum_imag(g, bath) for g in flat])
    else:
        grid = np.linspace(flat.min(), flat.max(), nodes)
        spline = interpolate.CubicSpline(grid, [correlation_spectrum_imag(g, bath) for g in grid])
        im = spline(flat)
    return im.reshape(gaps.shape)


TWO_EXCITON_RULES = ("occupation", "marginal")


def _rates(energies, overlap, bath, part="real"):
    # gamma_p = sum_p' C(E_p - E_p') O[p, p']
    gaps = energies[:, None] - energies[None, :]
    c = correlation_spectrum_real(gaps, bath) if part == "real" else _imag_on_gaps(gaps, bath)
    return np.sum(c * overlap, axis=1)


def one_exciton_rates(basis: ExcitonBasis, bath: BathSpec) -> NDArray[np.float64]:
    return _rates(basis.one_exciton_energies, basis.one_exciton_overlap(), bath)


def two_exciton_rates(basis: ExcitonBasis, bath: BathSpec, rule: str = "occupation") -> NDArray[np.float64]:
    return _rates(basis.two_exciton_energies, basis.two_exciton_overlap(rule), bath)


def state_dephasing_rate(manifold: Literal["g", "e", "f"], index: int, basis: ExcitonBasis,
                         bath: BathSpec, rule: str = "occupation") -> float:
    if manifold == "g":
        return 0.0
    if manifold == "e":
        if not 0 <= index < basis.n_e:
            raise IndexError(f"e-state index {index} out of range")
        return float(one_exciton_rates(basis, bath)[index])
    if manifold == "f":
        if not 0 <= index < basis.n_f:
            raise IndexError(f"f-state index {index} out of range")
        return float(two_exciton_rates(basis, bath, rule)[index])
    raise ValueError(f"unknown manifold {manifold!r}")


@dataclass(frozen=True)
class ResonanceTable:
    """Complex poles omega_pq + i Gamma_pq; ``z_fe[f, e]``."""

    z_eg: NDArray[np.complex128]
    z_fg: NDArray[np.complex128]
    z_fe: NDArray[np.complex128]
    gamma_e: NDArray[np.float64]
    gamma_f: NDArray[np.float64]


def resonance_table(basis: ExcitonBasis, bath: BathSpec, lamb_shift: bool = False,
                    rule: str = "occupation") -> ResonanceTable:
    """Poles z_pq = (E_p - E_q) + i (gamma_p + gamma_q) / 2 with gamma_g = 0.

    ``lamb_shift`` adds the principal-value part of the bath spectrum to the state
    energies; ``rule`` selects the two-exciton fluctuation weights.
    """
    o1, o2 = basis.one_exciton_overlap(), basis.two_exciton_overlap(rule)
    ge = _rates(basis.one_exciton_energies, o1, bath)
    gf = _rates(basis.two_exciton_energies, o2, bath)
    ee = np.array(basis.one_exciton_energies, dtype=float)
    ef = np.array(basis.two_exciton_energies, dtype=float)
    if lamb_shift:
        ee = ee + _rates(basis.one_exciton_energies, o1, bath, part="imag")
        ef = ef + _rates(basis.two_exciton_energies, o2, bath, part="imag")
    z_eg = ee + 0.5j * ge
    z_fg = ef + 0.5j * gf
    z_fe = (ef[:, None] - ee[None, :]) + 0.5j * (gf[:, None] + ge[None, :])
    return ResonanceTable(z_eg=z_eg, z_fg=z_fg, z_fe=z_fe, gamma_e=ge, gamma_f=gf)


def uniform_resonance_table(basis: ExcitonBasis, dephasing: float) -> ResonanceTable:
    """Every coherence dephases at the same rate, so Gamma_fe' equals Gamma_e'g."""
    ee, ef = basis.one_exciton_energies, basis.two_exciton_energies
    return ResonanceTable(
        z_eg=ee + 1j * dephasing,
        z_fg=ef + 1j * dephasing,
        z_fe=(ef[:, None] - ee[None, :]) + 1j * dephasing,
        gamma_e=np.full(basis.n_e, 2.0 * dephasing),
        gamma_f=np.full(basis.n_f, 2.0 * dephasing),
    )


def green_function(omega, z):
    """i / (omega - z) for a pole in the upper half plane."""
    z = np.asarray(z)
    if np.any(np.imag(z) <= 0):
        raise ValueError("resonance must have strictly positive imaginary part")
    return 1j / (np.asarray(omega) - z)
