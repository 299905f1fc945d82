"""dB / dBm / linear conversions used at every module boundary.

All internal math runs in linear units (watts, power gains); dB appears
only in configs and reports, converted exactly once at the boundary.
"""

from __future__ import annotations

import numpy as np


def db_to_linear(value_db):
    """10^(x/10). Works element-wise on arrays."""
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value):
    """10*log10(x). Input must be > 0."""
    return 10.0 * np.log10(np.asarray(value, dtype=float))


def dbm_to_watts(value_dbm):
    return 10.0 ** (np.asarray(value_dbm, dtype=float) / 10.0) * 1e-3


def watts_to_dbm(value_w):
    return 10.0 * np.log10(np.asarray(value_w, dtype=float) * 1e3)
