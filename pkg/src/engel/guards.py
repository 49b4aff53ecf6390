"""Exception hierarchy and the exit-code guard used by the command line."""

import logging
import time
from dataclasses import dataclass
from typing import Any, Dict, Optional


class EngelError(Exception):
    """Base class for every error raised by the toolkit."""

    exit_code = 1


class InvalidInput(EngelError):
    """Raised when arguments violate an operation's preconditions."""

    exit_code = 2


class AmbientMismatch(InvalidInput):
    """Raised when polynomial objects live on different coordinate lists."""


class UnknownCoordinate(InvalidInput):
    """Raised when a coordinate name is not part of the ambient list."""


class DegreeOverflow(InvalidInput):
    """Raised when a form operation would exceed the ambient dimension."""


class NotInDistribution(InvalidInput):
    """Raised when a tangent vector does not lie in the required distribution."""


class ExactDivisionByZero(InvalidInput, ZeroDivisionError):
    """Raised on exact division by zero."""


class NonFiniteValue(InvalidInput):
    """Raised when NaN or infinity would enter a geometric routine."""


class RankDegeneration(EngelError):
    """Raised when a distribution drops rank where a constant rank is required."""

    exit_code = 3


class VerificationFailure(EngelError):
    """Raised when a checked identity or lemma bound fails."""

    exit_code = 3


class BudgetExhausted(EngelError):
    """Raised when a search finds no feasible candidate within its budget."""

    exit_code = 4


EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_VERIFICATION_FAILURE = 3
EXIT_BUDGET_EXHAUSTED = 4


@dataclass
class GuardConfig:
    """Configuration for the command-line guard"""
    verification_failures_fatal: bool = True
    budget_exhaustion_fatal: bool = True
    max_recorded_errors: int = 1000

    @classmethod
    def from_runtime_config(cls, runtime_config: Dict[str, Any]) -> 'GuardConfig':
        """Create GuardConfig from runtime configuration."""
        return cls(
            verification_failures_fatal=runtime_config.get('verification_failures_fatal', True),
            budget_exhaustion_fatal=runtime_config.get('budget_exhaustion_fatal', True),
            max_recorded_errors=runtime_config.get('max_recorded_errors', 1000),
        )


class Guard:
    """Maps toolkit errors to exit codes and keeps error statistics."""

    def __init__(self, config: Optional[GuardConfig] = None):
        self.config = config or GuardConfig()
        self.logger = logging.getLogger(__name__)
        self.stats: Dict[str, Any] = {
            'handled': 0,
            'errors': [],
        }

    def exit_code_for(self, error: BaseException) -> int:
        """Return the exit code an error maps to."""
        if isinstance(error, VerificationFailure) or isinstance(error, RankDegeneration):
            return EXIT_VERIFICATION_FAILURE if self.config.verification_failures_fatal else EXIT_OK
        if isinstance(error, BudgetExhausted):
            return EXIT_BUDGET_EXHAUSTED if self.config.budget_exhaustion_fatal else EXIT_OK
        if isinstance(error, InvalidInput):
            return EXIT_INVALID_INPUT
        if isinstance(error, EngelError):
            return error.exit_code
        return EXIT_INVALID_INPUT if isinstance(error, (ValueError, KeyError)) else 1

    def record_error(self, context: str, error: BaseException) -> int:
        """Record an error and return its exit code."""
        self.stats['handled'] += 1
        self.stats['errors'].append({
            'context': context,
            'type': type(error).__name__,
            'error': str(error),
            'timestamp': time.time(),
        })
        if len(self.stats['errors']) > self.config.max_recorded_errors:
            self.stats['errors'] = self.stats['errors'][-self.config.max_recorded_errors:]
        code = self.exit_code_for(error)
        self.logger.error("%s failed with %s: %s (exit %d)", context, type(error).__name__, error, code)
        return code

    def get_fallback_message(self, error_type: str) -> str:
        """Get a one-line explanation for an error type."""
        messages = {
            'invalidinput': "The input does not satisfy the operation's preconditions.",
            'ambientmismatch': "The inputs use different coordinate lists.",
            'notindistribution': "The direction is not tangent to the distribution at the point.",
            'verificationfailure': "A checked identity failed; this is a build-breaking event.",
            'rankdegeneration': "The distribution does not have the required constant rank.",
            'budgetexhausted': "No feasible candidate was found within the search budget.",
        }
        return messages.get(error_type.lower(), "Unexpected error.")

    def get_stats(self) -> Dict[str, Any]:
        """Get guard statistics"""
        return {
            'handled': self.stats['handled'],
            'error_count': len(self.stats['errors']),
        }
