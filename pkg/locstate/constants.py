"""
This file is for constants that can be initialized without any (expensive) dependencies.
"""

import os

LOGLEVEL_ENV = "LOCSTATE_LOGLEVEL"
THREADS_ENV = "LOCSTATE_THREADS"

# Quadrature
MAX_QUADRATURE_ORDER = 2048
OUTER_ORDER_START = 64
OUTER_ORDER_CAP = 1024
OUTER_TOLERANCE = 1e-10
COEFFICIENT_ORDER_START = 96
COEFFICIENT_TOLERANCE = 1e-12

# Free-state evaluator regimes: below this value of k_m * a the chirp
# integral G(s) is integrated over the slit by adaptive Gauss-Legendre,
# above it the edge expansion takes over.
DIRECT_QUADRATURE_MAX_KA = 1200.0
EDGE_EXPANSION_MIN_ARGUMENT = 8.0
CHUNK_SIZE = 256

# Hermite functions
MAX_HERMITE_DEGREE = 10000
CLOSURE_ENVELOPE = 5.0

# Densities and comparisons
NORMALIZATION_TOLERANCE = 1e-6
DEFAULT_GRID_POINTS = 2001
NODE_THRESHOLD = 1e-12
FRAUNHOFER_MAX_FRESNEL_NUMBER = 0.1
FRESNEL_MIN_FRESNEL_NUMBER = 0.5

# Trajectories
TRAJECTORY_COUNT = 50
TRAJECTORY_STEPS = 2000
TRAJECTORY_STEP_FLOOR = 1e-6
TRAJECTORY_RTOL = 1e-9
# absolute tolerance in units of the slit width
TRAJECTORY_ATOL = 1e-9
TRAJECTORY_BATCH = 64
# recorded time points per trajectory in written output
TRAJECTORY_RECORDS = 200

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

PRESETS_DIR = os.path.join(os.path.dirname(__file__), "presets")
PRESET_NAMES = ("fig2", "fig3", "fig3-period", "fig4")

MODE_NAMES = (
    "free",
    "oscillator",
    "diffraction",
    "compare",
    "trajectories",
    "mean-energy",
    "momentum",
)
OUTPUT_FORMATS = ("csv", "json", "svg")
