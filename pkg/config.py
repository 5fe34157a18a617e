"""Configuration constants for the epoint exceptional-point toolkit.

This module contains all the configuration constants used throughout the
package, including numerical tolerances, loop-tracking defaults, output
schema settings and CLI exit codes.
"""

import logging
import os
from typing import Dict, Tuple

logger = logging.getLogger(__name__)

# Validation gates (relative to the largest input magnitude and 1)
EPS_TOL = 1e-9

# Biorthogonal failure threshold on |<l|r>| with unit-norm l, r
NORM_TOL = 1e-8

# EP tolerances, relative to max(1, ||H||^2)
DISC_TOL = 1e-10
NILP_TOL = 1e-9

# Cross-route agreement on lambda_c, relative
ROUTE_TOL = 1e-9

# Eigenvalues closer than sqrt(COALESCE_TOL) * ||m|| are reported as coalesced
COALESCE_TOL = 1e-12

# Polarization classification threshold on the axial ratio
POL_TOL = 1e-6

# Loop tracking
GAP_TOL = 1e-6
DEFAULT_STEPS = 256
MIN_STEPS = 8
MAX_REFINEMENTS = 12
RESTORE_TOL = 1e-8

# Output settings
SCHEMA = "epoint/1"
FLOAT_DIGITS = 17
CSV_LINE_TERMINATOR = "\n"

# Model parameter keys, in serialization order
PARAM_KEYS: Tuple[str, ...] = (
    "eps1",
    "eps2",
    "omega1",
    "omega2",
    "phi0",
    "tau0",
    "phi1",
    "tau1",
)
ANGLE_KEYS: Tuple[str, ...] = ("phi0", "tau0", "phi1", "tau1")
DEGREE_SUFFIX = "_deg"

# Sweep axes; "tau" moves tau0 and tau1 together
SWEEP_AXES: Tuple[str, ...] = ANGLE_KEYS + ("tau",)
MAX_SWEEP_AXES = 2

TRACE_COLUMNS: Tuple[str, ...] = (
    "step",
    "re_lambda",
    "im_lambda",
    "re_E1",
    "im_E1",
    "re_E2",
    "im_E2",
)

SWEEP_RESULT_COLUMNS: Tuple[str, ...] = (
    "status",
    "re_lambda_plus",
    "im_lambda_plus",
    "re_lambda_minus",
    "im_lambda_minus",
    "xi",
    "axial_ratio_plus",
    "handedness_plus",
    "axial_ratio_minus",
    "handedness_minus",
)

# Random model draws
RANDOM_ENERGY_RANGE = (-2.0, 2.0)
RANDOM_MARGIN = 0.05

# CLI exit codes
EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_DEGENERATE = 2
EXIT_DISAGREEMENT = 3
EXIT_PATH = 4

COMMANDS: Dict[str, str] = {
    "find-ep": "Locate both exceptional points by every applicable route",
    "vector": "Coalesced eigenvectors, overlap phases and polarization",
    "sweep": "Grid sweep over one or two angles",
    "encircle": "Track eigenvalue branches around a closed loop",
}


def env_int(name: str, default: int, minimum: int = 1) -> int:
    """Integer setting from the environment; falls back to `default` on a bad value."""
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning("%s=%r is not an integer, using %d", name, raw, default)
        return default
    if value < minimum:
        logger.warning("%s=%d is below %d, using %d", name, value, minimum, default)
        return default
    return value


# Runtime settings (environment / .env)
LOG_LEVEL = os.getenv("EPOINT_LOG_LEVEL", "WARNING")
SWEEP_WORKERS = env_int("EPOINT_WORKERS", 4)
