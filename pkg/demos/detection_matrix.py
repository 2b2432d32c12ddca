"""Detection rates for every adversary posture.

Reduced-trial version of the detect experiment (full run:
`pilotguard detect --out detect.csv`). Key confirmation catches the
baseline replay (different keys at the two ends), the trace check catches
random injection (power inflation), and the full-knowledge replacement
with matched power slips past both.
"""

from pilotguard.experiments import make_config, run_detect

cfg = make_config("detect", trials=400, seed=42)
res = run_detect(cfg)

print(f"{'mode':>16} {'keyconf':>8} {'traceA':>7} {'traceB':>7} "
      f"{'pairing':>8}")
for mode, gamma, delta, kc, ta, tb, pairing, trials in res.rows:
    print(f"{mode:>16} {kc:8.3f} {ta:7.3f} {tb:7.3f} {pairing:8.3f}")
print()
print("columns are failure rates over", res.rows[0][7], "trials;")
print("'pairing' fails when any of the three checks fails. The honest")
print("trace band (epsilon=0.2 at n=8) sits at 1.6 standard deviations of")
print("the trace statistic, so ~11% of clean estimates trip it; widen")
print("epsilon (e.g. --epsilon 0.35) for a quieter alarm at this size.")
