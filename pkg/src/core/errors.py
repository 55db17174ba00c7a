"""Exception hierarchy shared by every LECTOR module.

The CLI maps families to exit codes: configuration errors exit 2, similarity
errors exit 3, scheduler errors exit 4.
"""

from typing import Optional, Tuple


class LectorError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(LectorError):
    """Invalid experiment spec, overrides, prompt template or cache file."""


class NonFiniteValueError(LectorError, ValueError):
    """A NaN or infinite value reached a [0,1]-domain quantity."""


class SimilarityError(LectorError):
    """Base for failures while scoring a concept pair."""


class SimilarityParseError(SimilarityError):
    """The provider reply contained no decimal number."""

    def __init__(self, raw: str):
        super().__init__(f"No decimal number found in provider reply: {raw[:80]!r}")
        self.raw = raw


class SimilarityOutOfRangeError(SimilarityError):
    """The provider reply held a number outside [0, 1]."""

    def __init__(self, value: float, raw: str = ""):
        super().__init__(f"Similarity {value} is outside [0, 1]")
        self.value = value
        self.raw = raw


class ProviderTransportError(SimilarityError):
    """The completion endpoint could not be reached after all retries."""


class SimilarityUnavailableError(SimilarityError):
    """No similarity could be obtained for a pair."""

    def __init__(self, pair: Tuple[str, str], cause: Optional[BaseException] = None):
        super().__init__(f"Similarity unavailable for pair {pair}: {cause}")
        self.pair = pair
        self.cause = cause


class SchedulerError(LectorError):
    """A scheduler received invalid input or produced an invalid decision."""


class ConvergenceError(SchedulerError):
    """Value iteration stopped before the Bellman residual met its tolerance."""

    def __init__(self, residual: float, sweeps: int):
        super().__init__(f"Value iteration did not converge after {sweeps} sweeps (residual {residual:.3e})")
        self.residual = residual
        self.sweeps = sweeps


class SimulationAbortedError(LectorError):
    """A scheduler error stopped a run; `partial_log` holds the events recorded so far."""

    def __init__(self, cause: SchedulerError, partial_log):
        super().__init__(f"Simulation aborted: {cause}")
        self.cause = cause
        self.partial_log = partial_log


class UndefinedMetricError(LectorError):
    """A metric was requested over an empty event log."""
