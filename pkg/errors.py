# errors.py - Exception hierarchy and logging setup shared by the CLI and the API
import logging
from typing import Optional

from config import DEBUG

# Configure logging
logging.basicConfig(
    level=logging.DEBUG if DEBUG else logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger("replicator")


class ReplicatorException(Exception):
    """Base exception for the replicator toolkit."""
    def __init__(
        self,
        message: str,
        error_code: str = "general_error",
        status_code: int = 500,
        exit_code: int = 2
    ):
        self.message = message
        self.error_code = error_code
        self.status_code = status_code
        self.exit_code = exit_code
        super().__init__(self.message)


class GameValidationError(ReplicatorException):
    """A game specification violates one of its invariants."""
    def __init__(self, invariant: str, details: str = ""):
        self.invariant = invariant
        message = f"invalid game: {invariant}" + (f" ({details})" if details else "")
        super().__init__(
            message=message,
            error_code="invalid_game",
            status_code=422,
            exit_code=2
        )


class ConfigurationError(ReplicatorException):
    """Simulation or command configuration is invalid."""
    def __init__(self, details: str):
        super().__init__(
            message=f"invalid configuration: {details}",
            error_code="invalid_config",
            status_code=422,
            exit_code=2
        )


class EstimatorError(ReplicatorException):
    """An estimator cannot be evaluated on the given trajectory window."""
    def __init__(self, details: str):
        super().__init__(
            message=f"estimator error: {details}",
            error_code="estimator_error",
            status_code=422,
            exit_code=2
        )


class SimulationError(ReplicatorException):
    """The integrator produced a non-finite state."""
    def __init__(self, step: int, details: str = ""):
        self.step = step
        super().__init__(
            message=f"non-finite state at step {step}" + (f": {details}" if details else ""),
            error_code="numerical_failure",
            status_code=500,
            exit_code=3
        )


class VerificationFailed(ReplicatorException):
    """The verification battery reported at least one failing check."""
    def __init__(self, failed: Optional[list] = None):
        self.failed = failed or []
        super().__init__(
            message=f"verification failed: {', '.join(self.failed) or 'unknown check'}",
            error_code="verification_failed",
            status_code=200,
            exit_code=1
        )
