"""
Decibel conversions. All powers are handled in milliwatts internally,
configuration values in dBm/dB/dBi are converted once at the model
boundary through these helpers.
"""
import numpy as np
from scipy.constants import speed_of_light


def db_to_linear(value_db):
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0)


def dbm_to_mw(value_dbm):
    return db_to_linear(value_dbm)


def wavelength(carrier_freq: float) -> float:
    """Free-space wavelength in meters for a carrier frequency in Hz."""
    return speed_of_light / carrier_freq
