#  constants.py Copyright (c) 2026 Nikki Cooper
#
#  This program and the accompanying materials are made available under the
#  terms of the GNU Lesser General Public License, version 3.0 which is available at
#  https://www.gnu.org/licenses/gpl-3.0.html#license-text
#
# Numeric tolerances, built-in defaults and tags shared by every module.

TOOL_NAME = "pyHCT"
TOOL_VERSION = "0.3.1"

# Tree file format
TREE_FORMAT_VERSION = 1

# Splitting rule tags (as stored on tree nodes)
RULE_RP = "RP"
RULE_EV = "EV"
RULE_AEV = "AEV"
RULE_TWO_MEANS = "TwoMeans"
RULE_GRAPH_SWEEP = "GraphSweep"

# Command line spelling -> node tag
RULE_FLAGS = {
    "rp":     RULE_RP,
    "ev":     RULE_EV,
    "aev":    RULE_AEV,
    "2means": RULE_TWO_MEANS,
}
VECTOR_ONLY_RULES = (RULE_RP, RULE_EV, RULE_TWO_MEANS)

# Tolerances
UNIT_NORM_TOL = 1e-9
SYMMETRY_TOL = 1e-12
CLAMP_TOL = 1e-12            # negative aggregates smaller than this are rounding, not violations
DEGREE_FLOOR = 1e-12         # implicit-mode degrees are clamped up to this before D^-1/2
JACOBI_TOL = 1e-10
JACOBI_MAX_SWEEPS = 60
TIE_TOL = 1e-12

# Power iteration
DEFAULT_EPSILON = 0.1
DEFAULT_POWER_CONSTANT = 4.0

# Lloyd iterations inside the 2-means rule
LLOYD_TOL = 1e-7
LLOYD_MAX_ROUNDS = 100

# Balance band: each side keeps between n/3 and 2n/3 points
BALANCE_BAND = (1.0 / 3.0, 2.0 / 3.0)
FULL_BAND = (0.0, 1.0)

# Build / query defaults
DEFAULT_LEAF_MAX = 1
DEFAULT_BUCKET = 64
DEFAULT_KNN = 5
DEFAULT_SEED = 0
DEFAULT_TEST_FRACTION = 0.2
MEMBER_CACHE_SIZE = 256

# Metrics
BRUTE_FORCE_MAX_N = 2000
EXHAUSTIVE_MAX_N = 20

# Anomaly table
PAIR_CAP = 2000
DEFAULT_THRESHOLD_GRID = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)

# Default configuration file
CONFIG_FILE = "~/.config/pyHCT/pyHCT.ini"
CONFIG_ENV = "PYHCT_CONFIG"
