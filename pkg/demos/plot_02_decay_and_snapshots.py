"""
Ageing citations and yearly snapshots
=====================================

Weight each citation by how old it is, then follow total KQI year by year.
"""

import numpy as np

from kqi import (
    DecaySpec,
    SnapshotSpec,
    apply_decay,
    augment_super_root,
    detect_boom,
    growth_series,
    kqi_all,
    snapshot_at,
)
from kqi.graph import from_edge_list

rng = np.random.default_rng(0)
papers = [f"p{i:03d}" for i in range(120)]
years = {p: 1990 + i // 8 for i, p in enumerate(papers)}
edges = [
    (papers[i], papers[j])
    for j in range(len(papers))
    for i in range(j)
    if years[papers[i]] < years[papers[j]] and rng.random() < 0.05
]
g = from_edge_list(edges, nodes=papers, years=years)

# A rate of zero leaves every weight at exactly 1.0.
last = max(years.values())
unit = augment_super_root(g)
for rate in (0.0, 0.1, 0.3):
    kt = kqi_all(apply_decay(unit, DecaySpec(rate, last)))
    print(f"decay {rate}: total KQI {kt.total:.4f}")

# Snapshots are taken before augmentation.
early = augment_super_root(snapshot_at(g, SnapshotSpec(1995)))
print("papers up to 1995:", early.n_nodes - 1)

series = growth_series(g, range(1990, last + 1))
print(series.to_csv())
report = detect_boom(series)
print(f"boomed={report.boomed} rss={report.fit.rss:.2f} a={report.a:.3f}")
