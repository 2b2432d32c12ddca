"""Beamforming, achievable rates, and secrecy-outage evaluation.

Alice beamforms with B = V diag(sqrt(p)) where V holds the right singular
vectors of her channel estimate and p is the water-filling allocation over
the squared singular values under a unit total power budget. The secrecy
outage event compares the adversary's achievable rate against the margin
between the transmission rate R0 and the secret rate R_S:

    outage  <=>  R0 - log2 det(I + G1 B B^H G1^H) < R_S.

R0 itself is the mean rate of the honest channel under the same
beamforming rule and is estimated once per scenario by Monte Carlo.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import adversary
from .adversary import (
    MODE_BASELINE_BOTH,
    MODE_BASELINE_PHASE2,
    MODE_CORRELATED_ML,
    MODE_FULL_KNOWLEDGE,
    MODE_PASSIVE,
    MODE_RANDOM_Q,
)
from .channel import ChannelStatistics, observe_estimates, sample_channel_set
from .errors import ParameterError
from .numerics import svd
from .rng import SLOT_CHANNEL, SLOT_NOISE, SLOT_PLAN, trial_stream

__all__ = [
    "waterfill",
    "beamformer",
    "mutual_info_rate",
    "estimate_R0",
    "SopConfig",
    "SopResult",
    "sop_monte_carlo",
]

# Trials of the R0 estimator use their own stream space so adding SOP
# trials never shifts the R0 draws (and vice versa).
R0_STREAM_OFFSET = 1 << 40

_WATERFILL_TOL = 1e-12


def waterfill(gains, total_power: float = 1.0) -> np.ndarray:
    """Water-filling power allocation over parallel channel gains.

    Returns p with p_n = max(0, mu - 1/g_n) and sum(p) == total_power.
    The water level is located by bisection to 1e-12 and then snapped to
    the exact KKT value of the resulting active set (equal water level on
    active channels, total power conserved to machine precision). Zero
    gains always get zero power.
    """
    g = np.asarray(gains, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ParameterError("gains must be a non-empty 1-D sequence")
    if np.any(g < 0):
        raise ParameterError("gains must be >= 0")
    if total_power <= 0:
        raise ParameterError(f"total_power must be > 0, got {total_power}")
    if not np.any(g > 0):
        raise ParameterError("all gains are zero; allocation is degenerate")

    inv = np.full_like(g, np.inf)
    positive = g > 0
    inv[positive] = 1.0 / g[positive]

    def allocated(mu):
        return float(np.sum(np.maximum(0.0, mu - inv[positive])))

    lo = float(np.min(inv[positive]))
    hi = lo + total_power  # filling only the best channel reaches the budget
    while allocated(hi) < total_power:
        hi += total_power
    while hi - lo > _WATERFILL_TOL:
        mid = 0.5 * (lo + hi)
        if allocated(mid) < total_power:
            lo = mid
        else:
            hi = mid
    # Snap to the exact water level of the active set found by bisection.
    # Ties at the boundary are resolved deterministically by recomputing
    # the active set from the snapped level until it is self-consistent.
    mu = hi
    for _ in range(g.size):
        active = inv < mu
        mu_exact = (total_power + float(np.sum(inv[active]))) / int(
            np.count_nonzero(active))
        if np.array_equal(inv < mu_exact, active):
            mu = mu_exact
            break
        mu = mu_exact
    active = inv < mu
    p = np.maximum(0.0, mu - inv)
    p[~active] = 0.0
    # Absorb the last rounding crumb into the strongest channel.
    drift = total_power - float(np.sum(p))
    p[int(np.argmax(g))] += drift
    return p


def _waterfill_gains_batch(s2, total_power=1.0):
    """Vectorized exact water-filling over rows of squared singular values.

    ``s2`` is (batch, n) sorted descending along the last axis (SVD order).
    Returns powers in the same layout. Matches :func:`waterfill` to
    rounding; used by the Monte Carlo loops.
    """
    batch, n = s2.shape
    inv = np.where(s2 > 0, 1.0 / np.where(s2 > 0, s2, 1.0), np.inf)
    csum = np.cumsum(np.where(np.isfinite(inv), inv, 0.0), axis=1)
    ks = np.arange(1, n + 1)
    mu_k = (total_power + csum) / ks  # water level if the top k are active
    feasible = mu_k > inv  # level must clear the worst active channel
    feasible &= np.isfinite(inv)
    k_active = feasible.cumprod(axis=1).sum(axis=1)  # largest feasible prefix
    mu = mu_k[np.arange(batch), k_active - 1]
    p = np.maximum(0.0, mu[:, None] - inv)
    mask = np.arange(n)[None, :] < k_active[:, None]
    p = np.where(mask, p, 0.0)
    p[:, 0] += total_power - p.sum(axis=1)
    return p


def beamformer(h_est) -> np.ndarray:
    """Rate-maximizing beamformer for an estimated channel.

    B = V diag(sqrt(p)) with (U, S, V^H) the SVD of the estimate and p the
    water-filling allocation over S^2 under unit total power, so
    trace(B B^H) == 1.
    """
    h_est = np.asarray(h_est, dtype=complex)
    _, s, vh = svd(h_est)
    p = waterfill(s ** 2, 1.0)
    return vh.conj().T * np.sqrt(p)[None, :]


def mutual_info_rate(channel, b) -> float:
    """log2 det(I + C B B^H C^H) in bits."""
    c = np.asarray(channel, dtype=complex)
    b = np.asarray(b, dtype=complex)
    cb = c @ b
    m = np.eye(c.shape[0], dtype=complex) + cb @ cb.conj().T
    sign, logdet = np.linalg.slogdet(m)
    return float(logdet / math.log(2.0))


def _leak_rates_batch(g1_stack, est_stack):
    """Adversary rates log2 det(I + G1 B B^H G1^H) for stacked trials."""
    _, s, vh = np.linalg.svd(est_stack)
    p = _waterfill_gains_batch(s ** 2, 1.0)
    b = np.transpose(vh.conj(), (0, 2, 1)) * np.sqrt(p)[:, None, :]
    cb = g1_stack @ b
    n = g1_stack.shape[-1]
    m = np.eye(n) + cb @ np.transpose(cb.conj(), (0, 2, 1))
    return np.linalg.slogdet(m)[1] / math.log(2.0)


def estimate_R0(stats: ChannelStatistics, trials: int, seed: int):
    """Monte Carlo mean rate of the honest channel under beamforming.

    Draws fresh channel sets, beamforms on the true H, and averages
    log2 det(I + H B B^H H^H). Returns (mean, standard error).
    """
    if trials < 100:
        raise ParameterError(f"trials must be >= 100, got {trials}")
    hs = np.empty((trials, stats.n, stats.n), dtype=complex)
    for t in range(trials):
        stream = trial_stream(seed, R0_STREAM_OFFSET + t, SLOT_CHANNEL)
        hs[t] = sample_channel_set(stats, stream).h
    rates = _leak_rates_batch(hs, hs)
    mean = float(np.mean(rates))
    se = float(np.std(rates, ddof=1) / math.sqrt(trials))
    return mean, se


@dataclass(frozen=True)
class SopConfig:
    """One secrecy-outage Monte Carlo arm."""

    stats: ChannelStatistics
    attack_mode: str = MODE_PASSIVE
    sigma_q2: float = 0.5          # random-q only
    trials: int = 10_000
    trials_r0: int = 4_000
    rate_fraction: float = 0.2     # R_S / R0
    seed: int = 12345

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError(f"trials must be >= 1, got {self.trials}")
        if not 0.0 < self.rate_fraction < 1.0:
            raise ParameterError(
                f"rate_fraction must be in (0, 1), got {self.rate_fraction}"
            )
        valid = (MODE_PASSIVE, MODE_BASELINE_PHASE2, MODE_BASELINE_BOTH,
                 MODE_RANDOM_Q, MODE_CORRELATED_ML, MODE_FULL_KNOWLEDGE)
        if self.attack_mode not in valid:
            raise ParameterError(f"unknown attack mode {self.attack_mode!r}")
        if self.sigma_q2 < 0:
            raise ParameterError(f"sigma_q2 must be >= 0, got {self.sigma_q2}")


@dataclass(frozen=True)
class SopResult:
    p_out: float
    ci_half: float                 # 95% binomial half-width
    r0: float
    r0_se: float
    trials: int
    outage_count: int
    infeasible_count: int = 0
    alpha: Optional[float] = None


def _plan_for_trial(cfg: SopConfig, cset, trial: int):
    mode = cfg.attack_mode
    if mode == MODE_PASSIVE:
        return adversary.plan_passive()
    if mode in (MODE_BASELINE_PHASE2, MODE_BASELINE_BOTH):
        return adversary.plan_baseline(cfg.stats.n,
                                       both_phases=mode == MODE_BASELINE_BOTH)
    if mode == MODE_RANDOM_Q:
        stream = trial_stream(cfg.seed, trial, SLOT_PLAN)
        return adversary.plan_random_q(cset.g1, cset.g2, cfg.sigma_q2, stream)
    if mode == MODE_CORRELATED_ML:
        return adversary.plan_correlated_ml(cfg.stats, cset.g1, cset.g2)
    if mode == MODE_FULL_KNOWLEDGE:
        return adversary.plan_full_knowledge(cset.h, cset.g1, cset.g2)
    raise ParameterError(f"unknown attack mode {mode!r}")


def outage_flags(cfg: SopConfig, threshold: float, trials) -> np.ndarray:
    """Per-trial outage booleans for the given trial indices.

    Each trial derives its own random streams, so flags for a trial are
    identical no matter how trials are chunked across workers.
    """
    trials = list(trials)
    n = cfg.stats.n
    g1s = np.empty((len(trials), n, n), dtype=complex)
    ests = np.empty((len(trials), n, n), dtype=complex)
    for i, t in enumerate(trials):
        cset = sample_channel_set(
            cfg.stats, trial_stream(cfg.seed, t, SLOT_CHANNEL))
        plan = _plan_for_trial(cfg, cset, t)
        pair = observe_estimates(
            cset, plan, cfg.stats.gamma,
            trial_stream(cfg.seed, t, SLOT_NOISE))
        g1s[i] = cset.g1
        ests[i] = pair.h_a
    leaks = _leak_rates_batch(g1s, ests)
    return leaks > threshold


def sop_monte_carlo(cfg: SopConfig, r0: Optional[float] = None,
                    r0_se: float = 0.0) -> SopResult:
    """Estimate the secrecy outage probability of one attack arm.

    ``r0`` may be passed in when several arms share one scenario (the
    estimate is cached per scenario by the experiment runners); otherwise
    it is estimated here with ``cfg.trials_r0`` fresh draws.
    """
    if r0 is None:
        r0, r0_se = estimate_R0(cfg.stats, cfg.trials_r0, cfg.seed)
    alpha = None
    if cfg.attack_mode == MODE_CORRELATED_ML:
        # Scale feasibility depends only on the statistics, so it is
        # checked once up front; an infeasible scenario raises rather
        # than silently dropping trials.
        alpha = adversary.correlated_ml_moments(cfg.stats).alpha
    threshold = r0 * (1.0 - cfg.rate_fraction)
    flags = outage_flags(cfg, threshold, range(cfg.trials))
    count = int(np.count_nonzero(flags))
    p = count / cfg.trials
    ci = 1.96 * math.sqrt(p * (1.0 - p) / cfg.trials)
    return SopResult(p_out=p, ci_half=ci, r0=r0, r0_se=r0_se,
                     trials=cfg.trials, outage_count=count,
                     infeasible_count=0, alpha=alpha)
