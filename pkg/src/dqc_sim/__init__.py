"""Double-quantum-coherence spectra of Frenkel exciton aggregates under entangled and classical light."""

from dqc_sim.bath import (BathSpec, BrownianMode, ResonanceTable, bath_correlation_spectrum, green_function,
                          resonance_table, spectral_density, state_dephasing_rate, uniform_resonance_table)
from dqc_sim.config import RunConfig, load_config
from dqc_sim.model import AggregateSpec, ExcitonBasis, ValidationError, diagonalize_manifolds
from dqc_sim.photonics import ClassicalPulseSet, JsaGrid, Pulse, SpdcSource, jsa, jsa_singular_values
from dqc_sim.pipeline import run_job
from dqc_sim.signal import Axis, SpectrumGrid, SpectrumJob, signal_point, spectrum_2d

__version__ = "0.1.0"
