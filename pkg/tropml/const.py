"""Constants for tropml."""
from logging import Logger, getLogger

LOGGER: Logger = getLogger(__package__)

NAME = "Tropical ML Toolkit"
DOMAIN = "tropml"

MODEL_VERSION = "tropml-model-v1"
MODEL_TYPE_LOGISTIC = "logistic"
MODEL_TYPE_PCA = "pca"

CONF_SEED = "seed"
CONF_TOL = "tol"
CONF_HEADER = "header"
CONF_OUTPUT = "output"
CONF_PARALLEL = "parallel"
CONF_BURNIN = "burnin"
CONF_LOG_LEVEL = "log_level"

DEFAULT_SEED = 0
DEFAULT_TOL = 1e-9
DEFAULT_HEADER = False
DEFAULT_OUTPUT = None
DEFAULT_PARALLEL = 1
DEFAULT_BURNIN = 0.1
DEFAULT_LOG_LEVEL = "warning"
DEFAULT_CONFIG_PATH = "config/configuration.yaml"

# Canonical-form comparisons and membership
EQUAL_TOL = 1e-9
MEMBERSHIP_TOL = 1e-9
CHAIN_MEMBERSHIP_TOL = 1e-6
ULTRAMETRIC_TOL = 1e-9
RECONSTRUCTION_TOL = 1e-6

# Assignment solver for the tropical determinant
EXHAUSTIVE_DET_MAX = 8

# Hit-and-run
DEFAULT_INTERMEDIATE_STEPS = 50
DEFAULT_MAX_RETRIES = 100
DEFAULT_BRACKET_DOUBLINGS = 60
DEFAULT_DENSITY_CELLS = 1024
DENSITY_WINDOW_SIGMAS = 10.0

# Fermat-Weber
LP_DENSE_LIMIT = 100_000
DEFAULT_FW_MAX_ITERS = 5000
DEFAULT_FW_PATIENCE = 50
DEFAULT_FW_TOL = 1e-9
DEFAULT_FW_MIN_STEP = 1e-6
DEFAULT_FW_STEP_FRACTION = 0.25

# Learning
LINK_SCALE_BOUNDS = (1e-3, 1e3)
DEFAULT_KDE_MULTIPLIER = 2.0
BANDWIDTH_FLOOR = 1e-9
DEFAULT_PCA_ITERS = 1000
DEFAULT_PCA_STEPS = 50
DEFAULT_TRAIN_FRACTION = 0.8

# CLI output
SIGNIFICANT_DIGITS = 10

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2
EXIT_DIMENSION = 3
EXIT_SOLVER = 4
EXIT_GEOMETRY = 5
