"""Unit conventions: energies in cm^-1, times in fs, temperatures in K."""

import numpy as np
from scipy import constants

# angular frequency in rad/fs per cm^-1
CM1_TO_RAD_FS = 2.0 * np.pi * constants.c * 100.0 * 1e-15
# k_B in cm^-1 / K
KB_CM1_PER_K = constants.physical_constants["Boltzmann constant in inverse meter per kelvin"][0] / 100.0


def cm1_to_rad_fs(omega):
    return np.asarray(omega, dtype=float) * CM1_TO_RAD_FS


def rad_fs_to_cm1(omega):
    return np.asarray(omega, dtype=float) / CM1_TO_RAD_FS


def thermal_energy(temperature):
    """k_B T in cm^-1."""
    return KB_CM1_PER_K * temperature
