"""
Bootstrap percolation on citation graphs
========================================

Seed a few active papers and let activation spread to any paper with at
least ``a`` active neighbours.
"""

import numpy as np

from kqi import ActivationConfig, ArrivalSchedule, BaConfig, bootstrap_percolation, generate_ba
from kqi.analysis import threshold_statistic

n, steps = 10_000, 20
for m in (2, 3, 15):
    g = generate_ba(BaConfig(m, ArrivalSchedule.constant(n / steps), seed=0, steps=steps))
    print(f"m={m}: a at threshold = {threshold_statistic(m, n):.2f}")
    for a in (1, 2, 3, 4):
        runs = [bootstrap_percolation(g, ActivationConfig(a, 0.01, s)) for s in range(5)]
        frac = np.median([r[0] for r in runs])
        print(f"  a={a}: median active fraction {frac:.3f}, rounds {runs[0][1]}")
