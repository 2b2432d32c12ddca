"""Anatomy of the correlated steering attack.

When the adversary's channels are correlated with the legitimate one, she
can cancel her best estimate of it and re-inject a scaled copy of her own
channel, steering the estimate toward herself while keeping the gram
trace of an honest channel. This script prints the closed-form pieces of
that construction across the correlation range and verifies the power
budget by Monte Carlo.
"""

import numpy as np

from pilotguard import RngStream
from pilotguard.adversary import correlated_ml_moments, \
    induced_trace_expectation, plan_correlated_ml
from pilotguard.channel import SCALAR_DIAGONAL, ChannelStatistics, \
    observe_estimates, sample_channel_set

N = 6
print(f"{'zeta':>5} {'mmse gain':>10} {'residual':>9} {'alpha':>7} "
      f"{'aligned power':>14} {'trace target':>13} {'mc trace':>9}")
for zeta in (0.0, 0.2, 0.4, 0.6, 0.8):
    stats = ChannelStatistics(n=N, sigma_h2=0.5, sigma_g2=0.5, zeta=zeta,
                              correlation=SCALAR_DIAGONAL)
    mom = correlated_ml_moments(stats)
    closed = induced_trace_expectation(stats, N)

    traces = []
    for t in range(500):
        cset = sample_channel_set(stats, RngStream(11, 2 * t))
        plan = plan_correlated_ml(stats, cset.g1, cset.g2)
        pair = observe_estimates(cset, plan, 0.0, RngStream(11, 2 * t + 1))
        traces.append(np.sum(np.abs(pair.h_a) ** 2))

    aligned = mom.alpha ** 2 * stats.sigma_g2
    print(f"{zeta:5.1f} {-mom.a:10.4f} {mom.m1:9.4f} {mom.alpha:7.4f} "
          f"{aligned:14.4f} {closed:13.4f} {np.mean(traces):9.3f}")

print()
print("residual + aligned power always totals sigma_h2: the attack is")
print("invisible to the power check, and the aligned share (what points")
print("at the adversary) grows with the correlation factor.")
