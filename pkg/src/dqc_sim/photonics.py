"""Photon sources and their four-point field correlation functions.

Frequencies enter in cm^-1 and are converted to rad/fs wherever they multiply
times (phase functions, Gaussian widths set by a temporal FWHM).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import NDArray

from dqc_sim.model import ValidationError
from dqc_sim.units import CM1_TO_RAD_FS

LN2 = np.log(2.0)


def width_parameter(tau_fwhm: float) -> float:
    """Gamma_0 = 2 ln2 / tau^2 in fs^-2 for an intensity FWHM ``tau_fwhm`` in fs."""
    return 2.0 * LN2 / tau_fwhm ** 2


def gaussian_sigma_cm1(tau_fwhm: float) -> float:
    """Standard deviation (cm^-1) of exp[-d^2 / 4 Gamma_0] as a function of detuning d."""
    return np.sqrt(2.0 * width_parameter(tau_fwhm)) / CM1_TO_RAD_FS


@dataclass(frozen=True)
class SpdcSource:
    """Entangled photon pair from weak down-conversion of a Gaussian pump."""

    pump_center: float
    pump_width: float  # tau_p, fs
    t1: float
    t2: float
    center1: float
    center2: float
    alpha: float = 1.0
    e0: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.pump_width) and self.pump_width > 0):
            raise ValidationError("pump_width", f"must be > 0 fs, got {self.pump_width}")
        for name in ("pump_center", "t1", "t2", "center1", "center2", "alpha", "e0"):
            if not np.isfinite(getattr(self, name)):
                raise ValidationError(name, "must be finite")

    @property
    def entanglement_time(self) -> float:
        return abs(self.t2 - self.t1)

    @property
    def gamma_p(self) -> float:
        return width_parameter(self.pump_width)

    def with_changes(self, **kwargs) -> "SpdcSource":
        return SpdcSource(**{**self.__dict__, **kwargs})


@dataclass(frozen=True)
class Pulse:
    center: float  # cm^-1
    tau0: float  # fs, intensity FWHM
    chirp: float = 0.0  # fs^2
    e0: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.tau0) and self.tau0 > 0):
            raise ValidationError("tau0", f"must be > 0 fs, got {self.tau0}")
        for name in ("center", "chirp", "e0"):
            if not np.isfinite(getattr(self, name)):
                raise ValidationError(name, "must be finite")

    @property
    def gamma0(self) -> float:
        return width_parameter(self.tau0)

    @property
    def t0(self) -> float:
        """Temporal half-width at 1/e."""
        return 1.0 / np.sqrt(self.gamma0)

    @property
    def gamma(self) -> complex:
        """Complex width: 1/Gamma = 1/Gamma_0 - 2i phi2."""
        return 1.0 / complex(1.0 / self.gamma0, -2.0 * self.chirp)

    @property
    def stretched_width(self) -> float:
        """T_p = T_0 sqrt(1 + (2 phi2 / T_0^2)^2)."""
        t0 = self.t0
        return t0 * np.sqrt(1.0 + (2.0 * self.chirp / t0 ** 2) ** 2)

    @property
    def chirp_rate(self) -> float:
        """alpha = 2 phi2 / (T_0^4 + (2 phi2)^2), fs^-2."""
        t0 = self.t0
        return 2.0 * self.chirp / (t0 ** 4 + (2.0 * self.chirp) ** 2)


@dataclass(frozen=True)
class ClassicalPulseSet:
    """Four independent Gaussian pulses; slot j drives interaction j."""

    pulses: tuple[Pulse, Pulse, Pulse, Pulse]
    transform_limited: bool = False

    def __post_init__(self):
        pulses = tuple(self.pulses)
        if len(pulses) != 4:
            raise ValidationError("pulses", f"need exactly 4 pulses, got {len(pulses)}")
        object.__setattr__(self, "pulses", pulses)
        if self.transform_limited and any(p.chirp != 0 for p in pulses):
            raise ValidationError("pulses", "transform-limited set cannot carry chirp")

    @classmethod
    def identical(cls, center, tau0, chirp=0.0, e0=1.0, **kw) -> "ClassicalPulseSet":
        p = Pulse(center, tau0, chirp, e0)
        return cls((p, p, p, p), **kw)

    def scaled(self, factor: float) -> "ClassicalPulseSet":
        return ClassicalPulseSet(
            tuple(Pulse(p.center, p.tau0, p.chirp, p.e0 * factor) for p in self.pulses),
            self.transform_limited)


PhotonSource = Union[SpdcSource, ClassicalPulseSet]


def pump_envelope(wa, wb, src: SpdcSource):
    """Gaussian pump amplitude in the sum-frequency detuning."""
    g = src.gamma_p
    detuning = (src.pump_center - np.asarray(wa) - np.asarray(wb)) * CM1_TO_RAD_FS
    return src.e0 * np.sqrt(np.pi / g) * np.exp(-detuning ** 2 / (4.0 * g))


def _phase(wa, wb, src: SpdcSource):
    half = 0.5 * src.pump_center
    return ((np.asarray(wa) - half) * src.t1 + (np.asarray(wb) - half) * src.t2) * CM1_TO_RAD_FS


def jsa(wa, wb, src: SpdcSource):
    """Exchange-symmetrized joint spectral amplitude f(wa, wb)."""
    p_ab = _phase(wa, wb, src)
    p_ba = _phase(wb, wa, src)
    # np.sinc is sin(pi x)/(pi x)
    mode = np.sinc(p_ab / np.pi) * np.exp(1j * p_ab) + np.sinc(p_ba / np.pi) * np.exp(1j * p_ba)
    return src.alpha * pump_envelope(wa, wb, src) * mode


def four_point_entangled(w4, w3, w2, w1, src: SpdcSource):
    return np.conj(jsa(w4, w3, src)) * jsa(w2, w1, src)


def transform_limited_amplitude(omega, pulse: Pulse):
    g0 = pulse.gamma0
    d = (np.asarray(omega) - pulse.center) * CM1_TO_RAD_FS
    return pulse.e0 * np.sqrt(np.pi / g0) * np.exp(-d ** 2 / (4.0 * g0))


def pulse_amplitude(omega, pulse: Pulse):
    """Chirped Gaussian amplitude; reduces to the transform-limited form at zero chirp."""
    g0 = pulse.gamma0
    d = (np.asarray(omega) - pulse.center) * CM1_TO_RAD_FS
    d2 = d ** 2
    # -d^2 / (4 Gamma) with 1/Gamma = 1/Gamma_0 - 2i phi2; envelope and phase kept apart
    # so that zero chirp reproduces the transform-limited values exactly
    envelope = pulse.e0 * np.sqrt(np.pi / g0) * np.exp(-d2 / (4.0 * g0))
    return envelope * np.exp(1j * (0.5 * pulse.chirp * d2))


def four_point_classical(w4, w3, w2, w1, pulses: ClassicalPulseSet):
    amp = transform_limited_amplitude if pulses.transform_limited else pulse_amplitude
    p1, p2, p3, p4 = pulses.pulses
    return (np.conj(amp(w4, p4)) * np.conj(amp(w3, p3)) * amp(w2, p2) * amp(w1, p1))


def four_point(w4, w3, w2, w1, source: PhotonSource):
    if isinstance(source, SpdcSource):
        return four_point_entangled(w4, w3, w2, w1, source)
    if isinstance(source, ClassicalPulseSet):
        return four_point_classical(w4, w3, w2, w1, source)
    raise TypeError(f"unsupported photon source {type(source).__name__}")


def scale_source_amplitude(source: PhotonSource, factor: float) -> PhotonSource:
    if isinstance(source, SpdcSource):
        return source.with_changes(e0=source.e0 * factor)
    return source.scaled(factor)


# --- Schmidt decomposition of the JSA ---

MIN_JSA_POINTS = 32


@dataclass(frozen=True)
class JsaGrid:
    """Uniform grid centred on the source's two central frequencies.

    ``half_width`` in cm^-1; ``None`` picks 4x the larger of the pump spread and the
    phase-matching width, the latter capped at 25 pump spreads.
    """

    points: int = 128
    half_width: float | None = None
    n_values: int | None = 20

    def __post_init__(self):
        if self.points < MIN_JSA_POINTS:
            raise ValidationError("jsa.points", f"need at least {MIN_JSA_POINTS} points per axis, got {self.points}")
        if self.half_width is not None and not self.half_width > 0:
            raise ValidationError("jsa.half_width", "must be > 0")

    def resolve_half_width(self, src: SpdcSource) -> float:
        if self.half_width is not None:
            return self.half_width
        spread = gaussian_sigma_cm1(src.pump_width)
        cap = 25.0 * spread
        # phase-matching width pi / T_ent, limited so that T_ent -> 0 stays finite
        if src.entanglement_time * CM1_TO_RAD_FS * cap > np.pi:
            return 4.0 * max(spread, np.pi / (src.entanglement_time * CM1_TO_RAD_FS))
        return 4.0 * cap

    def axes(self, src: SpdcSource) -> tuple[NDArray, NDArray]:
        hw = self.resolve_half_width(src)
        wa = np.linspace(src.center1 - hw, src.center1 + hw, self.points)
        wb = np.linspace(src.center2 - hw, src.center2 + hw, self.points)
        return wa, wb


def _trapezoid_weights(axis: NDArray) -> NDArray:
    w = np.full(axis.shape, axis[1] - axis[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def schmidt_values(matrix, wa, wb, n_values: int | None = None) -> NDArray[np.float64]:
    """Normalized singular values of a sampled two-variable kernel.

    Entries are weighted by sqrt of the trapezoid weights on each axis so the values
    approximate the continuous Schmidt coefficients. Normalized to unit sum of squares
    over the full spectrum, then truncated to ``n_values``.
    """
    m = np.asarray(matrix, dtype=complex)
    wa = np.asarray(wa, dtype=float)
    wb = np.asarray(wb, dtype=float)
    m = m * np.sqrt(_trapezoid_weights(wa))[:, None] * np.sqrt(_trapezoid_weights(wb))[None, :]
    s = np.linalg.svd(m, compute_uv=False)
    norm = np.sqrt(np.sum(s ** 2))
    if norm == 0:
        raise ValueError("kernel vanishes on the grid")
    s = s / norm
    return s if n_values is None else s[:n_values]


def jsa_matrix(src: SpdcSource, grid: JsaGrid = JsaGrid()):
    wa, wb = grid.axes(src)
    return wa, wb, jsa(wa[:, None], wb[None, :], src)


def jsa_singular_values(src: SpdcSource, grid: JsaGrid = JsaGrid()) -> NDArray[np.float64]:
    wa, wb, f = jsa_matrix(src, grid)
    return schmidt_values(f, wa, wb, grid.n_values)
