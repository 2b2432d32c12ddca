"""Pairing decision: key confirmation plus the gram-trace countermeasure.

The trace check guards against power inflation: an injected perturbation
independent of the channel adds its power to the estimate's gram trace,
so each terminal compares the measured trace against the statistical
expectation n^2 (sigma_h2 + gamma) and rejects when the relative
deviation exceeds a tolerance. Pairing succeeds only when the key
confirmation verdict and both trace checks pass.
"""

from dataclasses import dataclass

from .channel import ChannelStatistics
from .errors import ParameterError
from .numerics import gram_trace

__all__ = [
    "expected_gram_trace",
    "TraceVerdict",
    "trace_check",
    "DetectionReport",
    "pairing_decision",
]


def expected_gram_trace(stats: ChannelStatistics) -> float:
    """E[trace(est est^H)] of an honest estimate: n^2 (sigma_h2 + gamma)."""
    return stats.n * stats.n * (stats.sigma_h2 + stats.gamma)


@dataclass(frozen=True)
class TraceVerdict:
    passed: bool
    measured: float
    expected: float


def trace_check(estimate, stats: ChannelStatistics,
                epsilon: float) -> TraceVerdict:
    """Two-sided relative band test on the estimate's gram trace.

    Passes iff |measured - expected| <= epsilon * expected. The measured
    trace of an honest n x n estimate concentrates with relative standard
    deviation 1/n, so epsilon is a band in those units scaled by n.
    """
    if epsilon <= 0:
        raise ParameterError(f"epsilon must be > 0, got {epsilon}")
    measured = gram_trace(estimate)
    expected = expected_gram_trace(stats)
    passed = abs(measured - expected) <= epsilon * expected
    return TraceVerdict(passed=passed, measured=measured, expected=expected)


@dataclass(frozen=True)
class DetectionReport:
    """Component verdicts and the pairing outcome they imply."""

    keyconf_passed: bool
    trace_a: TraceVerdict
    trace_b: TraceVerdict

    @property
    def pairing_succeeds(self) -> bool:
        return (self.keyconf_passed and self.trace_a.passed
                and self.trace_b.passed)


def pairing_decision(keyconf_passed: bool, trace_a: TraceVerdict,
                     trace_b: TraceVerdict) -> DetectionReport:
    """Combine the three verdicts; pairing succeeds only if all pass."""
    return DetectionReport(keyconf_passed=keyconf_passed,
                           trace_a=trace_a, trace_b=trace_b)
