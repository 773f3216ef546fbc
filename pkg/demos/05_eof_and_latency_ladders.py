"""Quantify the two structural advantages: orderflow access and latency.

Two ladders of otherwise-identical naive builders. In eof_sweep, player
i receives each searcher bundle with probability 0.80 + 0.02 i; in
latency_sweep, player i's network latency is 10 (i + 1) ms. Win rates
climb the access ladder and slide down the latency ladder.
"""
import numpy as np

from mevsim import ExperimentSpec, build_profile, run_batch

RUNS = 5000

for name, label in (("eof_sweep", "bundle access probability"),
                    ("latency_sweep", "individual latency")):
    prof = build_profile(name)
    m = run_batch(ExperimentSpec(profile=prof, runs_per_point=RUNS,
                                 master_seed=23))
    print(f"{name}: win rate vs {label}")
    for t, p in zip(prof.players, m.players):
        x = (f"pi={t.access_prob:.2f}" if name == "eof_sweep"
             else f"{t.individual_delay * 1000:3.0f} ms")
        bar = "#" * round(p.win_rate * 200)
        print(f"  {x:>8}  {p.win_rate * 100:5.2f}%  {bar}")
    wr = np.array([p.win_rate for p in m.players]) * 100
    slope = np.polyfit(np.arange(10), wr, 1)[0]
    print(f"  trend: {slope:+.2f} pp per rung\n")
