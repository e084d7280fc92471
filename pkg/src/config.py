"""Configuration constants for ctc-detector.

All times are in units of the switching width T (T = 1 internally).
"""

import os
from typing import Optional

from src.errors import ConfigurationError

QUADRATURE_DEFAULTS = {
    "abs_tol": 1e-12,
    "rel_tol": 1e-10,
    "max_subdivisions": 2000,
    "support_halfwidth": 13.0,  # Gaussian tail < 1e-36 beyond 13T
    "detour_radius": 0.2,
    "eps0": 1e-2,
    "eps_rungs": 6,
}

RESPONSE_DEFAULTS = {
    "gamma": 0.01,
    "xi": 1.0,
    "tail_tol": 1e-8,
    "max_images": 64,
    "tail_safety": 2.0,
    "clipped_mass_limit": 1e-6,
    "imag_residue_rel": 1e-10,
}

# Compact window used by the truncated switching, in units of T
TRUNCATED_WINDOW = {
    "halfwidth": 2.5,
    "edge_padding": 20.0,  # multiples of eps_uv beyond the window edge
}

# Regular parts switch to a Taylor series for |dtau| < factor * min(L, 1/W)
SERIES_THRESHOLD_FACTOR = 1e-3

# Mode-sum oracle: Gaussian factor below this at n_max
MODESUM_TAIL = 1e-30

VALIDATION_DEFAULTS = {
    "kernel_scaling_tolerance": 0.2,
    "ec_image_bound": 1e-8,
    "ec_image_n_max": 50,
    "ec_image_sensitivity_bound": 1e-6,
    "minkowski_oracle_bound": 1e-8,
    "ec_oracle_bound": 1e-6,
    "ads2_ir_bound": 1e-3,
    "ec_ir_bound": 1e-4,
    "ir_scaling_tolerance": 0.2,
    "contour_bound": 1e-8,
    "truncated_bound": 1e-3,
    "tm_zero_bound": 1e-4,
    "tm_xi_bound": 1e-8,
    "tm_shift_bound": 1e-12,
}

CSV_COLUMNS = [
    "swept",
    "P_TM",
    "P_AdS2",
    "P_EC",
    "P_M",
    "tail_estimate",
    "eps_residual",
    "status",
]
CSV_FLOAT_FORMAT = "%.16e"

PLOT_STYLE = {
    "figsize": (6.4, 4.2),
    "hashsalt": "ctc-detector",
    "series": {
        "P_TM": {"label": "time machine", "color": "#1f4e79"},
        "P_AdS2": {"label": "Poincaré-AdS$_2$", "color": "#c0392b"},
        "P_EC": {"label": "Einstein cylinder", "color": "#27ae60"},
        "P_M": {"label": "Minkowski", "color": "#7f7f7f"},
    },
    "axis_labels": {
        "circumference": r"$\ell = L/T$",
        "curvature": r"$w = WT$",
    },
}

THREADS_ENV_VAR = "CTC_DETECTOR_THREADS"


def thread_count(default: Optional[int] = None) -> int:
    """Worker cap from CTC_DETECTOR_THREADS, falling back to the CPU count."""
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or not raw.strip():
        return max(1, default if default is not None else (os.cpu_count() or 1))
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigurationError(
            f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}"
        ) from exc
    if value < 1:
        raise ConfigurationError(f"{THREADS_ENV_VAR} must be >= 1, got {value}")
    return value
