# config.py - Centralized configuration for Stochastic Replicator Lab
import os
from dotenv import load_dotenv

load_dotenv()


def _env_float(name: str, default: float) -> float:
    return float(os.getenv(name, default))


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, default))


# ================================
# Environment & Mode
# ================================
ENV = os.getenv("ENV", "development")
DEBUG = ENV == "development"
TOOL_VERSION = "1.0.0"

# ================================
# Numerical Tolerances
# ================================
NUMERIC_TOL = _env_float("NUMERIC_TOL", 1e-9)        # residuals, LP optima, strict inequalities
RANK_RCOND = _env_float("RANK_RCOND", 1e-9)          # singular-value cutoff relative to the largest
SIMPLEX_EPS_FACTOR = 4                               # |sum(x) - 1| <= 4 n eps
PRESCALE_LOW = 1.0                                   # payoffs scaled so max|a_ij| lies in [1, 10)
PRESCALE_HIGH = 10.0

# ================================
# Simulation
# ================================
DEFAULT_DT = _env_float("DEFAULT_DT", 1e-3)
MAX_RECORDED_POINTS = _env_int("MAX_RECORDED_POINTS", 1_000_000)
NOISE_BLOCK_STEPS = _env_int("NOISE_BLOCK_STEPS", 65_536)
DEFAULT_BURN_IN_FRACTION = 0.01
BATCH_MAX_WORKERS = _env_int("BATCH_MAX_WORKERS", os.cpu_count() or 1)

# ================================
# Estimators
# ================================
BATCH_MEANS_BATCHES = 32
DEFAULT_THIN = _env_int("DEFAULT_THIN", 10)

# ================================
# Verification Battery
# ================================
VERIFY_RUNS = _env_int("VERIFY_RUNS", 8)
VERIFY_T_FINAL = _env_float("VERIFY_T_FINAL", 1e4)
VERIFY_SEED_BASE = _env_int("VERIFY_SEED_BASE", 20240601)
TIME_AVERAGE_TOL = 0.02
HANNAN_TOL = 0.02
VARIANCE_REL_TOL = 0.15
COOCCURRENCE_TOL = 0.01
MOMENT_Z_LIMIT = 5.0                                 # pooled |z| of the Dirichlet moment check
BOUNDARY_LEVEL = 1e-6
BOUNDARY_FRACTION = 0.9
STABILITY_START_DISTANCE = 0.05
STABILITY_NEIGHBORHOOD = 0.2
STABILITY_TARGET_DISTANCE = 1e-4
STABILITY_T_FINAL = _env_float("STABILITY_T_FINAL", 500.0)
STABILITY_RUNS = _env_int("STABILITY_RUNS", 50)

# ================================
# API Configuration
# ================================
API_HOST = os.getenv("API_HOST", "0.0.0.0")
API_PORT = _env_int("API_PORT", 8000)
CORS_ORIGINS = os.getenv("CORS_ORIGINS", "*").split(",")
API_MAX_STEPS = _env_int("API_MAX_STEPS", 2_000_000)  # keeps /api/simulate requests short

# ================================
# Error Messages
# ================================
ERROR_MESSAGES = {
    "invalid_game": "The game specification violates an invariant.",
    "invalid_config": "The run configuration is invalid.",
    "estimator_error": "The trajectory does not support this estimate.",
    "numerical_failure": "The integrator produced a non-finite state.",
    "verification_failed": "One or more verification checks failed.",
    "general_error": "Something went wrong. Please try again.",
}


def get_error_message(error_key: str) -> str:
    """Get the user-facing message for an error code."""
    return ERROR_MESSAGES.get(error_key, ERROR_MESSAGES["general_error"])
