"""Secrecy outage vs antenna count, passive vs active adversary.

Reduced-trial version of the fig1 experiment (the CLI runs the full
10^4-trial sweep: `pilotguard fig1 --out fig1.csv`). Beamforming on more
antennas pushes the outage of a passive eavesdropper toward zero, while
un-precoded pilot replay during training keeps it alive.
"""

from pilotguard.experiments import make_config, run_fig1

cfg = make_config("fig1", n_list=(2, 4, 6), trials=2000, trials_r0=1000,
                  seed=42)
res = run_fig1(cfg, progress=print)

print()
print(f"{'n':>3} {'passive':>12} {'active':>12} {'r0 (bits)':>10}")
for n, sop_p, ci_p, sop_a, ci_a, r0 in res.rows:
    print(f"{n:>3} {sop_p:9.4f}+-{ci_p:.3f} {sop_a:9.4f}+-{ci_a:.3f} "
          f"{r0:10.2f}")
print()
print("active replay keeps the leak alive; the passive arm dies off with n")
