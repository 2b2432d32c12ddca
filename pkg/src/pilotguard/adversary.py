"""Adversarial pilot-injection strategies.

The adversary (Eve) can shape what the legitimate terminals estimate by
precoding her pilots. When she knows her own channels she can precode
phase 1 by G2^{-1} Q and phase 2 by G1^{-1} Q, so both terminals see the
same induced perturbation Q on top of the true channel; the strategies
below differ only in how Q is chosen:

* passive          -- no transmission at all (control arm).
* baseline         -- un-precoded pilots; the raw G channel leaks in.
* random-q         -- Q drawn i.i.d. Gaussian, no channel knowledge of H.
* correlated-ml    -- Q built from Eve's MMSE estimate of H (her channels
                      are correlated with H) and scaled so the induced
                      estimate keeps the gram trace of an honest channel.
* full-knowledge   -- Q = G1 - H replaces the channel outright.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import ChannelStatistics, build_joint_covariance
from .errors import AlphaInfeasibleError, ParameterError
from .numerics import inverse, sample_complex_gaussian
from .rng import RngStream

__all__ = [
    "MODE_PASSIVE",
    "MODE_BASELINE_PHASE2",
    "MODE_BASELINE_BOTH",
    "MODE_RANDOM_Q",
    "MODE_CORRELATED_ML",
    "MODE_FULL_KNOWLEDGE",
    "AttackPlan",
    "plan_passive",
    "plan_baseline",
    "plan_random_q",
    "eve_mmse_estimate",
    "CorrelatedMoments",
    "correlated_ml_moments",
    "induced_trace_expectation",
    "plan_correlated_ml",
    "plan_full_knowledge",
]

MODE_PASSIVE = "passive"
MODE_BASELINE_PHASE2 = "baseline-phase2"
MODE_BASELINE_BOTH = "baseline-both"
MODE_RANDOM_Q = "random-q"
MODE_CORRELATED_ML = "correlated-ml"
MODE_FULL_KNOWLEDGE = "full-knowledge"


@dataclass(frozen=True)
class AttackPlan:
    """Eve's per-phase precoders plus the perturbation they induce.

    ``p1``/``p2`` are the phase-1/phase-2 precoders (None means Eve is
    silent in that phase). ``q`` records the intended induced perturbation
    for reporting; ``alpha`` the power-matching scale of the correlated
    strategy, where applicable.
    """

    mode: str
    p1: Optional[np.ndarray] = None
    p2: Optional[np.ndarray] = None
    q: Optional[np.ndarray] = None
    alpha: Optional[float] = None


def plan_passive() -> AttackPlan:
    """Eve transmits nothing in either phase."""
    return AttackPlan(mode=MODE_PASSIVE)


def plan_baseline(n: int, both_phases: bool = False) -> AttackPlan:
    """Eve replays the public pilots without precoding.

    Phase 2 contaminates Alice's estimate with G1; with ``both_phases``
    Bob's estimate picks up G2 as well, so the two estimates differ by
    G1 - G2 and key agreement breaks down.
    """
    eye = np.eye(n, dtype=complex)
    return AttackPlan(
        mode=MODE_BASELINE_BOTH if both_phases else MODE_BASELINE_PHASE2,
        p1=eye.copy() if both_phases else None,
        p2=eye,
    )


def _precoders_for(q, g1, g2):
    return inverse(g2) @ q, inverse(g1) @ q


def plan_random_q(g1, g2, sigma_q2: float, rng: RngStream) -> AttackPlan:
    """Inject a random i.i.d. Gaussian perturbation with per-entry power
    ``sigma_q2`` into both estimates."""
    n = g1.shape[0]
    q = sample_complex_gaussian(n, n, sigma_q2, rng)
    p1, p2 = _precoders_for(q, g1, g2)
    return AttackPlan(mode=MODE_RANDOM_Q, p1=p1, p2=p2, q=q)


def _sblock_gains(stats: ChannelStatistics):
    """Per-entry MMSE combining gains (a, b) with hE = -(a g1 + b g2).

    Works on the 3x3 per-entry covariance block: with all cross-covariances
    proportional to the identity, the precision-matrix blocks of the full
    joint covariance are the same scalars, so the estimator reduces to one
    pair of real gains applied entrywise.
    """
    block = build_joint_covariance(stats)
    s = inverse(block).real
    a = s[0, 1] / s[0, 0]
    b = s[0, 2] / s[0, 0]
    return float(a), float(b)


def eve_mmse_estimate(stats: ChannelStatistics, g1, g2,
                      full_matrix: bool = False):
    """Eve's MMSE (= ML under the Gaussian model) estimate of h.

    ``g1`` and ``g2`` are vectorized channel observations. The default
    path applies the per-entry gains; ``full_matrix=True`` assembles the
    full joint covariance of the stacked vector [h; g1; g2], inverts it,
    and applies the precision-block formula directly. Both agree to
    rounding and the slow path exists as a cross-check.
    """
    g1 = np.asarray(g1, dtype=complex).reshape(-1)
    g2 = np.asarray(g2, dtype=complex).reshape(-1)
    if g1.shape != g2.shape:
        raise ParameterError("g1 and g2 must have the same length")
    if not full_matrix:
        a, b = _sblock_gains(stats)
        return -(a * g1 + b * g2)
    n2 = g1.size
    block = build_joint_covariance(stats)
    big = np.kron(block, np.eye(n2))
    s = inverse(big)
    s11 = s[:n2, :n2]
    s12 = s[:n2, n2:2 * n2]
    s13 = s[:n2, 2 * n2:]
    s11_inv = inverse(s11)
    return -(s11_inv @ (s12 @ g1) + s11_inv @ (s13 @ g2))


@dataclass(frozen=True)
class CorrelatedMoments:
    """Closed-form second-moment pieces of the correlated attack.

    The expected gram matrix of the induced channel h + q expands as
    M1 + alpha*M2 + alpha^2 * sigma_g2 * I per entry; on the
    scalar-diagonal path every piece is a scalar multiple of the identity,
    recorded here per entry. ``m2`` vanishes by the MMSE orthogonality
    principle and is kept as a computed quantity so tests can assert it.
    ``alpha`` solves trace = n^2 * sigma_h2 exactly.
    """

    a: float        # MMSE gain on g1 (sign convention hE = -(a g1 + b g2))
    b: float        # MMSE gain on g2
    m1: float       # per-entry alpha-free part of E[(h+q)(h+q)^H]
    m2: float       # per-entry linear-in-alpha part (zero up to rounding)
    alpha: float    # power-matching scale


def correlated_ml_moments(stats: ChannelStatistics) -> CorrelatedMoments:
    """Closed-form m1, m2 and the trace-matching scale alpha.

    With per-entry covariances k = E[g conj(h)] and r12 = E[g1 conj(g2)]:

        m1 = sigma_h2 + 4 k a + 2 a^2 (sigma_g2 + r12)
        m2 = 2 k + 2 a (sigma_g2 + r12)          (= 0 by orthogonality)

    The quadratic coefficient of alpha in the expected gram trace is
    sigma_g2 per entry, so matching trace = n^2 sigma_h2 gives

        alpha = sqrt(n^2 sigma_h2 - trace(M1)) / (n * sqrt(sigma_g2)).

    Raises :class:`AlphaInfeasibleError` when trace(M1) already exceeds
    the target and no real scale exists.
    """
    a, b = _sblock_gains(stats)
    block = build_joint_covariance(stats)
    k = float(block[0, 1])
    r12 = float(block[1, 2])
    sg = stats.sigma_g2
    m1 = stats.sigma_h2 + 4.0 * k * a + 2.0 * a * a * (sg + r12)
    m2 = 2.0 * k + 2.0 * a * (sg + r12)
    radicand = (stats.sigma_h2 - m1) / sg
    if radicand < -1e-12 * stats.sigma_h2:
        raise AlphaInfeasibleError(
            f"per-entry trace target {stats.sigma_h2} is below the "
            f"attack-free moment {m1}; no real scale exists"
        )
    alpha = float(np.sqrt(max(radicand, 0.0)))
    return CorrelatedMoments(a=a, b=b, m1=m1, m2=m2, alpha=alpha)


def induced_trace_expectation(stats: ChannelStatistics, n: int) -> float:
    """Closed-form E[trace((h+q)(h+q)^H)] of the correlated attack.

    Evaluates the full quadratic in alpha (including the m2 term) rather
    than its simplification, so it doubles as an identity check: the
    result equals n^2 * sigma_h2 whenever m2 vanishes as it should.
    """
    mom = correlated_ml_moments(stats)
    per_entry = (mom.m1 + mom.alpha * mom.m2
                 + mom.alpha ** 2 * stats.sigma_g2)
    return n * n * per_entry


def plan_correlated_ml(stats: ChannelStatistics, g1, g2) -> AttackPlan:
    """Steer both estimates toward Eve's channel under the trace budget.

    Eve cancels her MMSE estimate of h and re-injects alpha * g1, leaving
    the induced channel = (h - hE) + alpha g1 whose expected gram trace
    matches an honest channel's. With uncorrelated statistics the gains
    and alpha are zero and the plan degenerates to no injection.
    """
    mom = correlated_ml_moments(stats)
    h_e = -(mom.a * g1 + mom.b * g2)
    q = -h_e + mom.alpha * g1
    p1, p2 = _precoders_for(q, g1, g2)
    return AttackPlan(mode=MODE_CORRELATED_ML, p1=p1, p2=p2, q=q,
                      alpha=mom.alpha)


def plan_full_knowledge(h, g1, g2) -> AttackPlan:
    """Replace the legitimate channel with G1 outright (Eve knows H)."""
    q = g1 - h
    p1, p2 = _precoders_for(q, g1, g2)
    return AttackPlan(mode=MODE_FULL_KNOWLEDGE, p1=p1, p2=p2, q=q)
