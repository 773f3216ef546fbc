"""Sweep relay processing delay and compare the three-way strategy mix.

profile1 pits 4 naive, 4 adaptive, and 4 last-minute builders against
each other. Higher relay delay makes the adaptive players' picture of
the standing bids staler, eroding their edge; last-minute players keep
their advantage because their reveal step already compensates for
latency.
"""
import numpy as np

from mevsim import ExperimentSpec, build_profile, run_sweep

RUNS = 2000  # keep the demo quick; the acceptance gate uses 10k

spec = ExperimentSpec(
    profile=build_profile("profile1"),
    sweep_axis="global_delay",
    sweep_values=tuple(round(0.01 * k, 2) for k in range(1, 11)),
    runs_per_point=RUNS,
    master_seed=12,
)
results = run_sweep(spec)

print(f"win rates (%), {RUNS} auctions per point")
print(f"{'delay ms':>8} {'naive':>7} {'adaptive':>9} {'last-minute':>12}")
for delay, m in results:
    g = m.groups
    print(f"{delay * 1000:8.0f} {g['naive'].win_rate * 100:7.1f} "
          f"{g['adaptive'].win_rate * 100:9.1f} "
          f"{g['last_minute'].win_rate * 100:12.1f}")

ad = np.array([m.groups["adaptive"].win_rate for _, m in results]) * 100
slope = np.polyfit(np.arange(len(ad)), ad, 1)[0]
print(f"\nadaptive trend: {slope:+.2f} pp per 10 ms of extra delay")
